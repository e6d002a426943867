#include <benchmark/benchmark.h>

#include <vector>

#include "subspde/noise.hpp"
#include "subspde/rng.hpp"
#include "subspde/sim.hpp"

namespace {

using subspde::CorrelationKernel;

void BM_HeatQuadratureRiesz(benchmark::State& state) {
  const auto k = CorrelationKernel::riesz(0.5, 1);
  for (auto _ : state) benchmark::DoNotOptimize(subspde::h_heat_quadrature(k, 2.0));
}
BENCHMARK(BM_HeatQuadratureRiesz)->Unit(benchmark::kMicrosecond);

void BM_HeatQuadratureBesselPotential(benchmark::State& state) {
  const auto k = CorrelationKernel::bessel_potential(1.5, 2);
  for (auto _ : state) benchmark::DoNotOptimize(subspde::h_heat_quadrature(k, 2.0));
}
BENCHMARK(BM_HeatQuadratureBesselPotential)->Unit(benchmark::kMicrosecond);

void BM_WaveQuadratureBesselPotential(benchmark::State& state) {
  const auto k = CorrelationKernel::bessel_potential(0.5, 1);
  for (auto _ : state) benchmark::DoNotOptimize(subspde::h_wave_quadrature(k, 2.0));
}
BENCHMARK(BM_WaveQuadratureBesselPotential)->Unit(benchmark::kMicrosecond);

void BM_Philox(benchmark::State& state) {
  subspde::Philox4x32 eng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(eng());
}
BENCHMARK(BM_Philox);

void BM_NormalFill(benchmark::State& state) {
  subspde::NormalStream rng(1, 0);
  std::vector<double> out(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    rng.fill(out.data(), out.size(), 1.0);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NormalFill)->Arg(512);

void BM_NoiseSlice(benchmark::State& state) {
  const auto k = state.range(0) == 0 ? CorrelationKernel::white(1) : CorrelationKernel::riesz(0.5, 1);
  subspde::NoiseSampler sampler(k, 0.05, 0.01, 512);
  subspde::NormalStream rng(1, 0);
  std::vector<double> out(512);
  for (auto _ : state) {
    sampler.sample(rng, out.data());
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_NoiseSlice)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
