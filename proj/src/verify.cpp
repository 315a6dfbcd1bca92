#include "eakf/verify.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <ostream>

#include <omp.h>

#include "eakf/csv_io.hpp"
#include "eakf/eakf.hpp"
#include "eakf/oracle.hpp"

namespace eakf::harness {

namespace {

using nlohmann::json;

void require_range(const IntRange& r, const char* name, int min_lo) {
  if (!r.valid()) {
    throw Error(std::string(name) + " range is empty (" + std::to_string(r.lo) + " > " +
                std::to_string(r.hi) + ")");
  }
  if (r.lo < min_lo) {
    throw Error(std::string(name) + " range must start at >= " + std::to_string(min_lo));
  }
}

double safe_rel(double num, double den) { return num / std::max(den, oracle::kNormFloor); }

json trial_json(const TrialRecord& t) {
  json j = {
      {"index", t.index},
      {"kind", to_string(t.kind)},
      {"n", t.n},
      {"m", t.m},
      {"p", t.p},
      {"rank", t.rank},
      {"obs_rank", t.obs_rank},
      {"eakf_rel", t.eakf_rel},
      {"reduced_rel", t.reduced_rel},
      {"woodbury_rel", t.woodbury_rel},
      {"mean_rel", t.mean_rel},
      {"trace_deficit", t.trace_deficit},
      {"za_rowsum_rel", t.za_rowsum_rel},
      {"svd_recon_rel", t.svd_recon_rel},
      {"eig_recon_rel", t.eig_recon_rel},
      {"null_block_rel", t.null_block_rel},
      {"passed", t.passed},
  };
  if (!t.error.empty()) j["error"] = t.error;
  return j;
}

}  // namespace

void VerifyConfig::validate() const {
  if (trials < 1) throw Error("trials must be >= 1");
  if (!(tolerance > 0.0)) throw Error("tolerance must be > 0");
  require_range(ranges.n, "n", 1);
  require_range(ranges.m, "m", 2);
  require_range(ranges.p, "p", 1);
  if (ranges.p.lo > ranges.n.hi) throw Error("p range lies entirely above n range");
}

std::vector<InstanceKind> VerifyConfig::kinds() const {
  std::vector<InstanceKind> out{InstanceKind::generic};
  if (include_rank_deficient) {
    out.push_back(InstanceKind::rank_deficient);
    out.push_back(InstanceKind::zero_ensemble);
  }
  if (include_partial_obs) out.push_back(InstanceKind::partial_obs);
  if (include_zero_h) out.push_back(InstanceKind::zero_h);
  return out;
}

bool VerifyReport::all_passed() const {
  for (const auto& t : trials) {
    if (!t.passed) return false;
  }
  return !trials.empty();
}

std::map<std::string, int> VerifyReport::category_counts() const {
  std::map<std::string, int> counts{{"m_minus_1_lt_n", 0}, {"obs_rank_lt_rank", 0},
                                    {"zero_h", 0}, {"zero_ensemble", 0}};
  for (const auto& t : trials) {
    ++counts["kind:" + to_string(t.kind)];
    if (t.m - 1 < t.n) ++counts["m_minus_1_lt_n"];
    if (t.obs_rank < t.rank) ++counts["obs_rank_lt_rank"];
    if (t.kind == InstanceKind::zero_h) ++counts["zero_h"];
    if (t.rank == 0) ++counts["zero_ensemble"];
  }
  return counts;
}

TrialRecord run_trial(const VerifyConfig& config, int index) {
  const auto kinds = config.kinds();
  TrialRecord rec;
  rec.index = index;
  rec.kind = kinds[static_cast<std::size_t>(index) % kinds.size()];
  try {
    Rng rng(config.seed + static_cast<std::uint64_t>(index));
    const Instance inst = make_instance(rec.kind, config.ranges, rng);
    rec.kind = inst.kind;
    const ForecastEnsemble& ens = inst.ensemble;
    const ObservationModel& obs = inst.obs;
    rec.n = static_cast<int>(ens.state_dim());
    rec.m = static_cast<int>(ens.size());
    rec.p = static_cast<int>(obs.obs_dim());

    const PerturbationMatrix z = perturbation_matrix(ens);
    const Matrix pf = forecast_cov(z);
    const Matrix p_direct = oracle::posterior_cov_direct(pf, obs);
    const Matrix p_reduced = oracle::posterior_cov_reduced(z, obs);
    const Matrix p_woodbury = oracle::posterior_cov_woodbury(z, obs);
    const Vector mean_direct = oracle::posterior_mean_direct(ens.mean(), pf, obs);

    const AnalysisResult res = analyze(ens, obs);
    const auto cmp = oracle::compare_cov(res.Pa, p_direct, config.tolerance);
    rec.eakf_rel = cmp.frobenius_rel;
    rec.trace_deficit = cmp.trace_deficit;
    rec.reduced_rel = linalg::relative_frobenius(p_reduced, p_direct, oracle::kNormFloor);
    rec.woodbury_rel = linalg::relative_frobenius(p_woodbury, p_direct, oracle::kNormFloor);
    rec.mean_rel = linalg::relative_frobenius(res.mean_a, mean_direct, oracle::kNormFloor);
    rec.za_rowsum_rel = safe_rel(res.Za.rowwise().sum().norm(), res.Za.norm());

    const AdjustmentMatrix adj = adjustment_matrix(z, obs);
    const ObsSpaceProjection proj = project_observations(z, obs);
    rec.rank = static_cast<int>(adj.svd.rank);
    rec.obs_rank = rec.p > 0 && rec.m > 0 ? static_cast<int>(linalg::svd_full(proj.V, 1e-10).rank) : 0;
    rec.svd_recon_rel = safe_rel((adj.svd.F * adj.svd.G * adj.svd.U.transpose() - z.Z).norm(), z.Z.norm());
    rec.eig_recon_rel = safe_rel(
        (adj.eig.C * adj.eig.gamma.asDiagonal() * adj.eig.C.transpose() - proj.S).norm(), proj.S.norm());
    rec.null_block_rel =
        safe_rel((z.Z * adj.eig.C.rightCols(rec.m - rec.rank)).norm(), z.Z.norm());

    rec.passed = rec.eakf_rel <= config.tolerance && rec.reduced_rel <= config.tolerance &&
                 rec.woodbury_rel <= config.tolerance && rec.mean_rel <= config.tolerance &&
                 rec.za_rowsum_rel <= kRowSumTol && rec.svd_recon_rel <= kSvdReconTol &&
                 rec.eig_recon_rel <= kEigReconTol && rec.null_block_rel <= kEigReconTol;
  } catch (const std::exception& e) {
    rec.error = e.what();
    rec.passed = false;
  }
  return rec;
}

VerifyReport run_verify_serial(const VerifyConfig& config) {
  config.validate();
  VerifyReport report{config, {}};
  report.trials.reserve(static_cast<std::size_t>(config.trials));
  for (int i = 0; i < config.trials; ++i) {
    report.trials.push_back(run_trial(config, i));
  }
  return report;
}

VerifyReport run_verify(const VerifyConfig& config) {
  config.validate();
  VerifyReport report{config, std::vector<TrialRecord>(static_cast<std::size_t>(config.trials))};
  const int trials = config.trials;
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < trials; ++i) {
    report.trials[static_cast<std::size_t>(i)] = run_trial(config, i);
  }
  return report;
}

nlohmann::json to_json(const VerifyReport& report) {
  const VerifyConfig& c = report.config;
  double max_rel = 0.0, max_chain = 0.0, max_mean = 0.0;
  int failed = 0;
  json trials = json::array();
  for (const auto& t : report.trials) {
    max_rel = std::max(max_rel, t.eakf_rel);
    max_chain = std::max({max_chain, t.reduced_rel, t.woodbury_rel});
    max_mean = std::max(max_mean, t.mean_rel);
    if (!t.passed) ++failed;
    trials.push_back(trial_json(t));
  }
  return json{
      {"schema", 1},
      {"command", "verify"},
      {"config",
       {{"trials", c.trials},
        {"seed", c.seed},
        {"n_range", {c.ranges.n.lo, c.ranges.n.hi}},
        {"m_range", {c.ranges.m.lo, c.ranges.m.hi}},
        {"p_range", {c.ranges.p.lo, c.ranges.p.hi}},
        {"tolerance", c.tolerance},
        {"include_rank_deficient", c.include_rank_deficient},
        {"include_partial_obs", c.include_partial_obs},
        {"include_zero_h", c.include_zero_h}}},
      {"categories", report.category_counts()},
      {"max_rel_err", max_rel},
      {"max_chain_rel_err", max_chain},
      {"max_mean_rel_err", max_mean},
      {"failed", failed},
      {"passed", report.all_passed()},
      {"trials", std::move(trials)},
  };
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int cmd_verify(const VerifyConfig& config, const std::string& out_path, std::ostream& log) {
  try {
    config.validate();
  } catch (const Error& e) {
    log << "verify: " << e.what() << '\n';
    return 2;
  }
  const VerifyReport report = run_verify(config);
  json j = to_json(report);
  j["generated_at"] = utc_timestamp();
  if (!out_path.empty()) {
    io::write_text_file(out_path, j.dump(2) + "\n");
  }
  log << "verify: " << report.trials.size() << " trials, " << j["failed"].get<int>()
      << " failed, max_rel_err " << j["max_rel_err"].get<double>() << ", max_chain_rel_err "
      << j["max_chain_rel_err"].get<double>() << ", max_mean_rel_err "
      << j["max_mean_rel_err"].get<double>() << '\n';
  for (const auto& [name, count] : report.category_counts()) {
    log << "  " << name << ": " << count << '\n';
  }
  return report.all_passed() ? 0 : 1;
}

}  // namespace eakf::harness
