#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "eakf/instances.hpp"

namespace eakf::harness {

/// Correct vs misordered EAKF on one instance, against the Kalman posterior.
struct PitfallCase {
  std::string name;
  int n = 0, m = 0, p = 0, rank = 0;
  double oracle_trace = 0.0;
  double correct_trace = 0.0;
  double misordered_trace = 0.0;
  double deficit = 0.0;  // oracle_trace - misordered_trace
  double correct_rel = 0.0;
  bool correct_passed = false;
  bool reproduced = false;  // deficit strictly positive (beyond rounding)
};

struct PitfallReport {
  std::uint64_t seed = 0;
  double tolerance = 1e-10;
  std::vector<PitfallCase> cases;

  bool passed() const;
};

PitfallCase run_pitfall_case(const std::string& name, const Instance& inst, std::uint64_t seed,
                             double tolerance);

/// The scalar instance plus one random rank-deficient instance (n = 6, m = 4,
/// p = 3) drawn from `seed`.
PitfallReport run_pitfall_demo(std::uint64_t seed, double tolerance = 1e-10);

nlohmann::json to_json(const PitfallReport& report);

/// Prints the trace comparison and optionally writes JSON. Returns 0 iff the
/// correct update matches the oracle and the misordered one is under-dispersed
/// on every case, 1 otherwise.
int cmd_demo_pitfall(std::uint64_t seed, const std::string& json_path, std::ostream& out);

}  // namespace eakf::harness
