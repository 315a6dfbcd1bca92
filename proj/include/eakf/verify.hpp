#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "eakf/instances.hpp"

namespace eakf::harness {

struct VerifyConfig {
  int trials = 1000;
  std::uint64_t seed = 0;
  InstanceRanges ranges;
  double tolerance = 1e-10;
  bool include_rank_deficient = false;
  bool include_partial_obs = false;
  bool include_zero_h = false;

  /// Throws eakf::Error describing the first invalid field.
  void validate() const;
  /// Instance kinds cycled through by trial index.
  std::vector<InstanceKind> kinds() const;
};

// Structural thresholds checked on every trial alongside the tolerance.
inline constexpr double kRowSumTol = 1e-12;
inline constexpr double kSvdReconTol = 1e-12;
inline constexpr double kEigReconTol = 1e-10;

struct TrialRecord {
  int index = 0;
  InstanceKind kind = InstanceKind::generic;
  int n = 0, m = 0, p = 0;
  int rank = 0;      // rank Z^f
  int obs_rank = 0;  // rank H Z^f, equivalently rank S
  double eakf_rel = 0.0;      // ||Z^a Z^aT - P_direct|| / ||P_direct||
  double reduced_rel = 0.0;   // reduced route vs direct
  double woodbury_rel = 0.0;  // Woodbury route vs direct
  double mean_rel = 0.0;
  double trace_deficit = 0.0;
  double za_rowsum_rel = 0.0;
  double svd_recon_rel = 0.0;
  double eig_recon_rel = 0.0;
  double null_block_rel = 0.0;  // ||Z C(:, r:)|| / ||Z||
  bool passed = false;
  std::string error;
};

struct VerifyReport {
  VerifyConfig config;
  std::vector<TrialRecord> trials;

  bool all_passed() const;
  /// Counts by generated kind plus structural categories actually hit.
  std::map<std::string, int> category_counts() const;
};

/// One seeded trial; the instance RNG is seeded with config.seed + index.
TrialRecord run_trial(const VerifyConfig& config, int index);

/// Serial reference sweep.
VerifyReport run_verify_serial(const VerifyConfig& config);
/// OpenMP sweep over trials; identical output to run_verify_serial.
VerifyReport run_verify(const VerifyConfig& config);

/// Report without a timestamp; `cmd_verify` adds "generated_at".
nlohmann::json to_json(const VerifyReport& report);

/// Runs the sweep and writes the JSON report to `out_path` (if non-empty).
/// Returns 0 if every trial passes, 1 otherwise, 2 on configuration errors.
int cmd_verify(const VerifyConfig& config, const std::string& out_path, std::ostream& log);

/// ISO-8601 UTC timestamp for report headers.
std::string utc_timestamp();

}  // namespace eakf::harness
