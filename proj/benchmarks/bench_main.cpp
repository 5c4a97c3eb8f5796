#include <benchmark/benchmark.h>

#include <vector>

#include "fbst/calibrate.hpp"
#include "fbst/montecarlo.hpp"
#include "fbst/quadrature.hpp"
#include "fbst/risk.hpp"
#include "fbst/special_functions.hpp"

namespace {

void BM_NormalCdf(benchmark::State& state) {
  double x = -6.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fbst::std_normal_cdf(x));
    x = x > 6.0 ? -6.0 : x + 1e-3;
  }
}
BENCHMARK(BM_NormalCdf);

void BM_NormalQuantile(benchmark::State& state) {
  double p = 1e-6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fbst::std_normal_quantile(p));
    p = p > 0.999 ? 1e-6 : p + 1e-4;
  }
}
BENCHMARK(BM_NormalQuantile);

void BM_GaussHermiteLookup(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(&fbst::quadrature::gauss_hermite_rule(static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_GaussHermiteLookup)->Arg(64)->Arg(128);

// range(0) = n, range(1) = 1 for the adaptive scheme.
void BM_ExpectedType2(benchmark::State& state) {
  const auto c = fbst::make_config(0, 1, 0, 10, state.range(0));
  fbst::QuadratureOptions q;
  if (state.range(1)) q.scheme = fbst::QuadratureScheme::adaptive;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fbst::expected_type2_error(0.18, c, q));
  }
}
BENCHMARK(BM_ExpectedType2)->Args({10, 0})->Args({10, 1})->Args({2000, 0})->Args({2000, 1});

void BM_OptimalCutoff(benchmark::State& state) {
  const auto c = fbst::make_config(0, 1, 0, 10, state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fbst::optimal_cutoff(c, {1, 1}));
  }
  state.SetLabel("n=" + std::to_string(state.range(0)));
}
BENCHMARK(BM_OptimalCutoff)->Arg(10)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_SimulateRejection(benchmark::State& state) {
  const auto c = fbst::make_config(0, 1, 0, 1, 50);
  fbst::McOptions mc;
  mc.draws = state.range(0);
  mc.workers = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fbst::estimate_rejection_rate(0.2, 0.0, c, mc));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateRejection)->Arg(100'000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
