#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace eakf::harness {

/// Linear-Gaussian twin experiment: x_{k+1} = decay * x_k + w_k,
/// w_k ~ N(0, model_var I); every obs_every steps the full state is observed
/// with noise N(0, obs_var I).
struct TwinConfig {
  int steps = 500;
  int n = 3;
  int m = 12;
  double decay = 0.95;
  double model_var = 0.1;
  double obs_var = 0.5;
  int obs_every = 1;
  std::uint64_t seed = 1;

  void validate() const;
};

struct TwinStep {
  int step = 0;
  bool observed = false;
  double rmse = 0.0;    // ||mu^a - x_true|| / sqrt(n)
  double spread = 0.0;  // sqrt(trace(P^a) / n)
};

struct TwinResult {
  TwinConfig config;
  std::vector<TwinStep> series;
  double mean_rmse = 0.0;    // over the final half of the run
  double mean_spread = 0.0;  // over the final half of the run
  bool finite = true;

  double spread_ratio() const { return mean_spread / mean_rmse; }
};

TwinResult run_twin(const TwinConfig& config);

nlohmann::json to_json(const TwinResult& result);

/// Writes JSON metrics to `out_path` and, if non-empty, the time series as
/// "step,observed,rmse,spread" CSV. Returns 0 on success, 1 if the run went
/// non-finite, 2 on configuration errors.
int cmd_twin(const TwinConfig& config, const std::string& out_path, const std::string& series_path,
             std::ostream& log);

}  // namespace eakf::harness
