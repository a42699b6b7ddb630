#include <benchmark/benchmark.h>

#include "cavlock/noise.hpp"

namespace {

cavlock::NoiseSimConfig bench_config(double duration) {
  cavlock::NoiseSimConfig cfg;
  cfg.h0 = 1.0;
  cfg.sample_rate_hz = 256.0;
  cfg.duration_s = duration;
  cfg.seed = 42;
  return cfg;
}

}  // namespace

static void BM_SynthesizeField(benchmark::State& state) {
  const auto cfg = bench_config(static_cast<double>(state.range()));
  for (auto _ : state) {
    auto series = cavlock::synthesize_locked_field(cfg);
    benchmark::DoNotOptimize(series);
  }
  state.SetItemsProcessed(state.iterations() * state.range() * 256);
}
BENCHMARK(BM_SynthesizeField)->Arg(256)->Arg(1024)->Arg(4096);

static void BM_EstimateLineshape(benchmark::State& state) {
  const auto cfg = bench_config(1024.0);
  const auto series = cavlock::synthesize_locked_field(cfg);
  for (auto _ : state) {
    auto est = cavlock::estimate_lineshape(series, cfg);
    benchmark::DoNotOptimize(est);
  }
}
BENCHMARK(BM_EstimateLineshape);
