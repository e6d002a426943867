#include <benchmark/benchmark.h>

#include "subspde/sim.hpp"

namespace {

using subspde::HeatScheme;
using subspde::SimulationConfig;

// 10 paths of 100 steps on 512 cells; items are cell updates.
void BM_HeatStep(benchmark::State& state) {
  SimulationConfig c;
  c.scheme = static_cast<HeatScheme>(state.range(0));
  c.n = 512;
  c.L = 12.8;
  c.dt = c.scheme == HeatScheme::Explicit ? 0.00125 : 0.0025;
  c.snapshot_times = {100 * c.dt};
  c.paths = 10;
  c.batches = 2;
  for (auto _ : state) benchmark::DoNotOptimize(subspde::simulate(c).paths.size());
  state.SetItemsProcessed(state.iterations() * 10 * 100 * 512);
}
BENCHMARK(BM_HeatStep)
    ->Arg(static_cast<int>(HeatScheme::Explicit))
    ->Arg(static_cast<int>(HeatScheme::Implicit))
    ->Arg(static_cast<int>(HeatScheme::Spectral))
    ->Unit(benchmark::kMillisecond);

void BM_WaveStep(benchmark::State& state) {
  SimulationConfig c;
  c.equation = subspde::SimEquation::Wave;
  c.n = 512;
  c.L = 12.8;
  c.dt = 0.025;
  c.snapshot_times = {100 * c.dt};
  c.paths = 10;
  c.batches = 2;
  for (auto _ : state) benchmark::DoNotOptimize(subspde::simulate(c).paths.size());
  state.SetItemsProcessed(state.iterations() * 10 * 100 * 512);
}
BENCHMARK(BM_WaveStep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
