// Serial reference sweep vs the OpenMP sweep over verification trials.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "eakf/verify.hpp"

namespace {

eakf::harness::VerifyConfig sweep_config(int trials) {
  eakf::harness::VerifyConfig cfg;
  cfg.trials = trials;
  cfg.seed = 2024;
  cfg.include_rank_deficient = true;
  cfg.include_partial_obs = true;
  cfg.include_zero_h = true;
  return cfg;
}

void BM_VerifySerial(benchmark::State& state) {
  const auto cfg = sweep_config(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto report = eakf::harness::run_verify_serial(cfg);
    benchmark::DoNotOptimize(report.trials.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_VerifyParallel(benchmark::State& state) {
  const auto cfg = sweep_config(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto report = eakf::harness::run_verify(cfg);
    benchmark::DoNotOptimize(report.trials.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = omp_get_max_threads();
}

}  // namespace

BENCHMARK(BM_VerifySerial)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VerifyParallel)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
