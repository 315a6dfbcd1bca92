#include "eakf/twin.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "eakf/csv_io.hpp"
#include "eakf/eakf.hpp"
#include "eakf/verify.hpp"

namespace eakf::harness {

void TwinConfig::validate() const {
  if (steps < 1) throw Error("steps must be >= 1");
  if (n < 1) throw Error("n must be >= 1");
  if (m < 2) throw Error("m must be >= 2");
  if (!(decay > 0.0 && decay <= 1.0)) throw Error("decay must lie in (0, 1]");
  if (!(model_var >= 0.0)) throw Error("model variance must be >= 0");
  if (!(obs_var > 0.0)) throw Error("observation variance must be > 0");
  if (obs_every < 1) throw Error("obs-every must be >= 1");
}

TwinResult run_twin(const TwinConfig& config) {
  config.validate();
  const Index n = config.n;
  const Index m = config.m;
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal;
  const double model_sd = std::sqrt(config.model_var);
  const double obs_sd = std::sqrt(config.obs_var);

  auto draw = [&](Index rows, Index cols) {
    Matrix out(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) out(i, j) = normal(rng);
    return out;
  };

  Vector truth = draw(n, 1);
  Matrix members = draw(n, m);
  const Matrix h = Matrix::Identity(n, n);
  const Vector r_diag = Vector::Constant(n, config.obs_var);

  TwinResult result;
  result.config = config;
  result.series.reserve(static_cast<std::size_t>(config.steps));

  for (int k = 1; k <= config.steps; ++k) {
    truth = config.decay * truth + model_sd * draw(n, 1);
    members = config.decay * members + model_sd * draw(n, m);

    TwinStep step;
    step.step = k;
    step.observed = (k % config.obs_every) == 0;

    ForecastEnsemble forecast(members);
    Vector mean = forecast.mean();
    Matrix pa;
    if (step.observed) {
      const Vector y = truth + obs_sd * Vector(draw(n, 1));
      const ObservationModel obs = ObservationModel::with_diagonal_r(h, r_diag, y);
      const AnalysisResult res = analyze(forecast, obs);
      members = reconstruct_members(res.mean_a, res.Za).members();
      mean = res.mean_a;
      pa = res.Pa;
    } else {
      pa = forecast_cov(perturbation_matrix(forecast));
    }

    step.rmse = (mean - truth).norm() / std::sqrt(static_cast<double>(n));
    step.spread = std::sqrt(std::max(pa.trace(), 0.0) / static_cast<double>(n));
    if (!std::isfinite(step.rmse) || !std::isfinite(step.spread)) result.finite = false;
    result.series.push_back(step);
  }

  const std::size_t start = result.series.size() / 2;
  double rmse_sum = 0.0, spread_sum = 0.0;
  for (std::size_t i = start; i < result.series.size(); ++i) {
    rmse_sum += result.series[i].rmse;
    spread_sum += result.series[i].spread;
  }
  const double count = static_cast<double>(result.series.size() - start);
  result.mean_rmse = rmse_sum / count;
  result.mean_spread = spread_sum / count;
  return result;
}

nlohmann::json to_json(const TwinResult& result) {
  const TwinConfig& c = result.config;
  return {{"schema", 1},
          {"command", "twin"},
          {"config",
           {{"steps", c.steps},
            {"n", c.n},
            {"m", c.m},
            {"decay", c.decay},
            {"model_var", c.model_var},
            {"obs_var", c.obs_var},
            {"obs_every", c.obs_every},
            {"seed", c.seed}}},
          {"finite", result.finite},
          {"time_mean_rmse", result.mean_rmse},
          {"time_mean_spread", result.mean_spread},
          {"spread_to_rmse", result.spread_ratio()},
          {"final_rmse", result.series.back().rmse},
          {"final_spread", result.series.back().spread}};
}

int cmd_twin(const TwinConfig& config, const std::string& out_path, const std::string& series_path,
             std::ostream& log) {
  try {
    config.validate();
  } catch (const Error& e) {
    log << "twin: " << e.what() << '\n';
    return 2;
  }
  const TwinResult result = run_twin(config);
  auto j = to_json(result);
  j["generated_at"] = utc_timestamp();
  if (!out_path.empty()) io::write_text_file(out_path, j.dump(2) + "\n");
  if (!series_path.empty()) {
    std::string csv = "step,observed,rmse,spread\n";
    char buf[96];
    for (const auto& s : result.series) {
      std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g\n", s.step, s.observed ? 1 : 0, s.rmse,
                    s.spread);
      csv += buf;
    }
    io::write_text_file(series_path, csv);
  }
  log << "twin: " << config.steps << " steps, time-mean rmse " << result.mean_rmse
      << ", time-mean spread " << result.mean_spread << ", ratio " << result.spread_ratio() << '\n';
  return result.finite ? 0 : 1;
}

}  // namespace eakf::harness
