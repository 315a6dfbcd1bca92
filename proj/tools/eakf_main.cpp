// eakf: command-line front end for the EAKF library.
//
//   eakf verify        random-instance sweep against the Kalman oracle
//   eakf demo-pitfall  correct vs misordered eigenvector columns
//   eakf assimilate    one analysis step from CSV files
//   eakf twin          cycled linear-Gaussian twin experiment

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "eakf/assimilate.hpp"
#include "eakf/pitfall.hpp"
#include "eakf/twin.hpp"
#include "eakf/verify.hpp"

namespace {

constexpr int kUsageError = 2;

}  // namespace

int main(int argc, char** argv) {
  using namespace eakf::harness;

  CLI::App app{"Ensemble Adjustment Kalman Filter: verification and demonstration tools"};
  app.require_subcommand(1);

  VerifyConfig verify;
  std::string verify_out;
  auto* verify_cmd = app.add_subcommand("verify", "Check EAKF posterior covariance against the Kalman oracle");
  verify_cmd->add_option("--trials", verify.trials, "Number of random instances")->capture_default_str();
  verify_cmd->add_option("--seed", verify.seed, "Base seed (trial i uses seed + i)")->capture_default_str();
  verify_cmd->add_option("--n-min", verify.ranges.n.lo)->capture_default_str();
  verify_cmd->add_option("--n-max", verify.ranges.n.hi)->capture_default_str();
  verify_cmd->add_option("--m-min", verify.ranges.m.lo)->capture_default_str();
  verify_cmd->add_option("--m-max", verify.ranges.m.hi)->capture_default_str();
  verify_cmd->add_option("--p-min", verify.ranges.p.lo)->capture_default_str();
  verify_cmd->add_option("--p-max", verify.ranges.p.hi, "Upper bound on p (also capped at n)")->capture_default_str();
  verify_cmd->add_option("--tol", verify.tolerance, "Relative Frobenius tolerance")->capture_default_str();
  verify_cmd->add_flag("--rank-deficient", verify.include_rank_deficient,
                       "Include m - 1 < n and zero-spread ensembles");
  verify_cmd->add_flag("--partial-obs", verify.include_partial_obs, "Include p < rank Z^f instances");
  verify_cmd->add_flag("--zero-h", verify.include_zero_h, "Include H = 0 instances");
  verify_cmd->add_option("--out", verify_out, "JSON report path");

  std::uint64_t pitfall_seed = 0;
  std::string pitfall_json;
  auto* pitfall_cmd = app.add_subcommand("demo-pitfall", "Show under-dispersion from misordered eigenvectors");
  pitfall_cmd->add_option("--seed", pitfall_seed)->capture_default_str();
  pitfall_cmd->add_option("--json", pitfall_json, "JSON report path");

  AssimilateOptions assim;
  std::string mode = "correct";
  std::uint64_t assim_seed = 0;
  auto* assim_cmd = app.add_subcommand("assimilate", "Run one analysis step on CSV inputs");
  assim_cmd->add_option("--ensemble", assim.ensemble_path, "n x m members, one per column")->required();
  assim_cmd->add_option("--H", assim.h_path, "p x n observation operator")->required();
  assim_cmd->add_option("--R", assim.r_path, "p x p covariance or p x 1 variances")->required();
  assim_cmd->add_option("--y", assim.y_path, "p x 1 observation vector")->required();
  assim_cmd->add_option("--mode", mode)->check(CLI::IsMember({"correct", "misordered"}))->capture_default_str();
  assim_cmd->add_option("--seed", assim_seed, "Permutation seed for --mode misordered")->capture_default_str();
  assim_cmd->add_option("--tol", assim.tolerance)->capture_default_str();
  assim_cmd->add_option("--out-prefix", assim.out_prefix)->required();

  TwinConfig twin;
  std::string twin_out;
  std::string twin_series;
  auto* twin_cmd = app.add_subcommand("twin", "Cycled twin experiment with a linear-Gaussian model");
  twin_cmd->add_option("--steps", twin.steps)->capture_default_str();
  twin_cmd->add_option("--n", twin.n)->capture_default_str();
  twin_cmd->add_option("--m", twin.m)->capture_default_str();
  twin_cmd->add_option("--decay", twin.decay)->capture_default_str();
  twin_cmd->add_option("--model-var", twin.model_var)->capture_default_str();
  twin_cmd->add_option("--obs-var", twin.obs_var)->capture_default_str();
  twin_cmd->add_option("--obs-every", twin.obs_every)->capture_default_str();
  twin_cmd->add_option("--seed", twin.seed)->capture_default_str();
  twin_cmd->add_option("--out", twin_out, "JSON metrics path");
  twin_cmd->add_option("--series", twin_series, "CSV time series path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*verify_cmd) {
      return cmd_verify(verify, verify_out, std::cout);
    }
    if (*pitfall_cmd) {
      return cmd_demo_pitfall(pitfall_seed, pitfall_json, std::cout);
    }
    if (*assim_cmd) {
      assim.mode = mode == "correct" ? eakf::OrderingMode::correct()
                                     : eakf::OrderingMode::misordered(assim_seed);
      return cmd_assimilate(assim, std::cout, std::cerr);
    }
    if (*twin_cmd) {
      return cmd_twin(twin, twin_out, twin_series, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "eakf: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}
