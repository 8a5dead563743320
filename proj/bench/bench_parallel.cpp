#include <benchmark/benchmark.h>

#include <omp.h>

#include "gbh/bound.hpp"
#include "gbh/simulator.hpp"

namespace {

gbh::SimConfig bench_config() {
  gbh::SimConfig c;
  c.rho = 0.1;
  c.replications = 2000;
  return c;
}

void BM_run_mc_serial(benchmark::State& state) {
  const gbh::SimConfig c = bench_config();
  for (auto _ : state) benchmark::DoNotOptimize(gbh::serial::run_mc(c).fdr_hat);
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(c.replications));
}

void BM_run_mc_parallel(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(0)));
  const gbh::SimConfig c = bench_config();
  for (auto _ : state) benchmark::DoNotOptimize(gbh::run_mc(c).fdr_hat);
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(c.replications));
}

struct Grid {
  std::vector<double> lambdas, rhos;
  Grid() {
    for (int i = 1; i <= 50; ++i) lambdas.push_back(i / 100.0);
    for (int k = 1; k <= 340; ++k) rhos.push_back(k / 1000.0);
  }
};

void BM_bound_curve_serial(benchmark::State& state) {
  const Grid g;
  for (auto _ : state) benchmark::DoNotOptimize(gbh::serial::bound_curve(g.lambdas, g.rhos, 0.05).size());
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.lambdas.size() * g.rhos.size()));
}

void BM_bound_curve_parallel(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(0)));
  const Grid g;
  for (auto _ : state) benchmark::DoNotOptimize(gbh::bound_curve(g.lambdas, g.rhos, 0.05).size());
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.lambdas.size() * g.rhos.size()));
}

}  // namespace

BENCHMARK(BM_run_mc_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_run_mc_parallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_bound_curve_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_bound_curve_parallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
