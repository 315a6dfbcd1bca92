#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "eakf/eakf.hpp"
#include "eakf/instances.hpp"

namespace eakf::harness {

struct AssimilateOptions {
  std::string ensemble_path;  // n x m, one member per column
  std::string h_path;         // p x n
  std::string r_path;         // p x p, or p x 1 holding the diagonal
  std::string y_path;         // p x 1
  std::string out_prefix;
  OrderingMode mode = OrderingMode::correct();
  double tolerance = 1e-10;
};

/// Reads and shape-checks the four inputs. Errors name the offending file and
/// the expected shape.
Instance load_assimilation_inputs(const AssimilateOptions& opts);

/// Writes <prefix>_members.csv, <prefix>_mean.csv and <prefix>_report.json.
/// Returns 0 if the analysis covariance matches the Kalman posterior within
/// tolerance, 1 if it does not, 2 on input errors.
int cmd_assimilate(const AssimilateOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace eakf::harness
