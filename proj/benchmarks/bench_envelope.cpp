#include <benchmark/benchmark.h>

#include "subspde/envelope.hpp"

namespace {

using subspde::DiffusionCoefficient;
using subspde::Envelope;

void BM_FInverseClosed(benchmark::State& state) {
  const Envelope env(DiffusionCoefficient::ratio_power(0.5, 1.0));
  double y = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(env.F_inverse(y));
    y = y < 1e6 ? y * 1.01 : 1.0;
  }
}
BENCHMARK(BM_FInverseClosed);

void BM_FInverseNumeric(benchmark::State& state) {
  const Envelope env(DiffusionCoefficient::ratio_power(0.5, 1.0));
  double y = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(env.F_inverse_numeric(y));
    y = y < 1e6 ? y * 1.01 : 1.0;
  }
}
BENCHMARK(BM_FInverseNumeric);

void BM_FInverseLogPerturbedNumeric(benchmark::State& state) {
  const Envelope env(DiffusionCoefficient::log_perturbed(0.5, 0.5));
  double y = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(env.F_inverse(y));
    y = y < 1e6 ? y * 1.01 : 1.0;
  }
}
BENCHMARK(BM_FInverseLogPerturbedNumeric);

void BM_Thresholds(benchmark::State& state) {
  double beta = 1.0;
  for (auto _ : state) {
    const auto c = DiffusionCoefficient::log_perturbed(1.0, beta);
    benchmark::DoNotOptimize(c.thresholds().M);
    beta = beta < 5.0 ? beta + 0.01 : 1.0;
  }
}
BENCHMARK(BM_Thresholds)->Unit(benchmark::kMillisecond);

void BM_FixedPointOracle(benchmark::State& state) {
  const auto c = DiffusionCoefficient::ratio_power(0.5, 1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(subspde::fixed_point_oracle([&](double x) { return c.rho_p(2.0, x); }, 3.0, 0.5));
}
BENCHMARK(BM_FixedPointOracle);

}  // namespace

BENCHMARK_MAIN();
