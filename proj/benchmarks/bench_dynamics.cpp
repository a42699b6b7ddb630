#include <benchmark/benchmark.h>

#include "cavlock/dynamics.hpp"

static void BM_FlowRhs(benchmark::State& state) {
  const auto fp = cavlock::make_flow({100.0, 1e3, 0.0, 0.0});
  const auto s =
      cavlock::branch_state(cavlock::solve_branches({100.0, 1e3, 0.0, 0.0})
                                .top(),
                            fp);
  for (auto _ : state) {
    auto rhs = cavlock::flow_rhs(s, fp);
    benchmark::DoNotOptimize(rhs);
  }
}
BENCHMARK(BM_FlowRhs);

static void BM_ClassifyStability(benchmark::State& state) {
  const cavlock::DimensionlessPoint p{100.0, 1e3, 0.0, 0.0};
  const auto fp = cavlock::make_flow(p);
  const auto set = cavlock::solve_branches(p);
  for (auto _ : state) {
    auto classified = cavlock::classify_stability(set, fp);
    benchmark::DoNotOptimize(classified);
  }
}
BENCHMARK(BM_ClassifyStability);

// Stiff relaxation from vacuum onto the saturated branch.
static void BM_RelaxFromVacuum(benchmark::State& state) {
  const auto fp = cavlock::make_flow({100.0, 5e3, 0.0, 0.0},
                                     static_cast<double>(state.range()));
  for (auto _ : state) {
    auto end = cavlock::evolve(cavlock::vacuum_state(), fp, 50.0, 1e-8);
    benchmark::DoNotOptimize(end);
  }
}
BENCHMARK(BM_RelaxFromVacuum)->Arg(1000)->Arg(100000)->Arg(1000000);
