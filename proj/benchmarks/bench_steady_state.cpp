#include <benchmark/benchmark.h>

#include "cavlock/io.hpp"
#include "cavlock/steady_state.hpp"

static void BM_SolveBranchesUnique(benchmark::State& state) {
  const cavlock::DimensionlessPoint p{100.0, 5e3, 0.0, 0.0};
  for (auto _ : state) {
    auto set = cavlock::solve_branches(p);
    benchmark::DoNotOptimize(set);
  }
}
BENCHMARK(BM_SolveBranchesUnique);

static void BM_SolveBranchesBistable(benchmark::State& state) {
  const cavlock::DimensionlessPoint p{100.0, 1e3, 3.0, 0.1};
  for (auto _ : state) {
    auto set = cavlock::solve_branches(p);
    benchmark::DoNotOptimize(set);
  }
}
BENCHMARK(BM_SolveBranchesBistable);

static void BM_ScanSpectrum(benchmark::State& state) {
  const auto grid = cavlock::linspace(-300.0, 300.0,
                                      static_cast<std::size_t>(state.range()));
  for (auto _ : state) {
    auto sets = cavlock::scan_spectrum(100.0, 1e3, grid);
    benchmark::DoNotOptimize(sets);
  }
  state.SetComplexityN(state.range());
}
BENCHMARK(BM_ScanSpectrum)->Range(64, 4096)->Complexity(benchmark::oN);

static void BM_SurfaceCell(benchmark::State& state) {
  const std::vector<double> deltas{-50.0, 0.0, 50.0};
  const std::vector<double> thetas{-0.5, 0.0, 0.5};
  for (auto _ : state) {
    auto surface = cavlock::scan_surface(100.0, 5e3, deltas, thetas);
    benchmark::DoNotOptimize(surface);
  }
}
BENCHMARK(BM_SurfaceCell);
