#include <benchmark/benchmark.h>

#include "rfcw/exact_engine.hpp"
#include "rfcw/g_function.hpp"
#include "rfcw/mc_engine.hpp"
#include "rfcw/rate_theory.hpp"

namespace {

void BM_ExactLogPmf(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto fields = rfcw::sample_fields(rfcw::make_distribution("two_point 0.3 0.5"), n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(rfcw::exact_log_pmf(fields, 1.2));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ExactLogPmf)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oNSquared);

void BM_GDerivative(benchmark::State& state) {
  const rfcw::GFunction g(1.2, rfcw::make_distribution("gaussian 0 0.5"));
  const int order = static_cast<int>(state.range(0));
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rfcw::g_deriv(g, order, x));
    x += 1e-9;
  }
}
BENCHMARK(BM_GDerivative)->Arg(1)->Arg(4)->Arg(8);

void BM_AnalyzeMinima(benchmark::State& state) {
  const rfcw::GFunction g(2.0, rfcw::make_distribution("two_point 0.46 0.5"));
  for (auto _ : state) benchmark::DoNotOptimize(rfcw::analyze_minima(g));
}
BENCHMARK(BM_AnalyzeMinima);

void BM_LdpRate(benchmark::State& state) {
  const rfcw::LdpRate rate(rfcw::GFunction(0.8, rfcw::make_distribution("dirac 0.2")));
  for (auto _ : state) benchmark::DoNotOptimize(rate(0.5));
}
BENCHMARK(BM_LdpRate);

void BM_GlauberSweeps(benchmark::State& state) {
  rfcw::ChainConfig cfg;
  cfg.beta = 1.2;
  cfg.fields = rfcw::sample_fields(rfcw::make_distribution("two_point 0.3 0.5"), static_cast<std::size_t>(state.range(0)), 2);
  cfg.sweeps = 110;
  cfg.burn_in = 10;
  cfg.thin = 1;
  cfg.seed = 3;
  for (auto _ : state) benchmark::DoNotOptimize(rfcw::run_glauber(cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.sweeps) * state.range(0));
}
BENCHMARK(BM_GlauberSweeps)->Arg(100)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
