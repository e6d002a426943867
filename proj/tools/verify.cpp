#include "verify.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "subspde/envelope.hpp"
#include "subspde/errors.hpp"
#include "subspde/noise.hpp"
#include "subspde/presets.hpp"
#include "subspde/rng.hpp"
#include "subspde/sim.hpp"

namespace subspde::tools {

namespace {

constexpr std::size_t kMaxMessages = 8;

void note(SuiteResult& r, bool ok, const std::string& what) {
  ++r.checks;
  if (ok) return;
  ++r.failures;
  if (r.messages.size() < kMaxMessages) r.messages.push_back(what);
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

SuiteResult envelope_suite() {
  SuiteResult r;
  r.name = "envelope";
  std::vector<DiffusionCoefficient> coeffs;
  for (double a : {0.0, 0.25, 0.5, 0.75})
    for (double rr : {0.0, 1.0, 2.0}) coeffs.push_back(DiffusionCoefficient::ratio_power(a, rr));
  coeffs.push_back(DiffusionCoefficient::log_perturbed(1.0, 1.0));
  coeffs.push_back(DiffusionCoefficient::log_perturbed(1.0, 2.0));
  coeffs.push_back(DiffusionCoefficient::iterated_log(1.0, 2.0));
  const auto ys = log_grid(1e-3, 1e3, 1000);
  for (const auto& c : coeffs) {
    const Envelope env(c);
    for (double y : ys) {
      const double closed = env.F_inverse(y);
      const double numeric = env.F_inverse_numeric(y);
      std::ostringstream os;
      os << c.describe() << " y=" << y << ": closed " << closed << " numeric " << numeric;
      note(r, rel_err(closed, numeric) <= 1e-8, os.str());
    }
  }
  return r;
}

SuiteResult gamma_suite(std::uint64_t seed) {
  SuiteResult r;
  r.name = "gamma";
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  // a pool of random coefficients, each paired with many random (k, b)
  std::vector<DiffusionCoefficient> pool;
  for (int i = 0; i < 400; ++i) {
    switch (i % 5) {
      case 0: pool.push_back(DiffusionCoefficient::ratio_power(0.95 * U(gen), 3.0 * U(gen))); break;
      case 1: pool.push_back(DiffusionCoefficient::log_perturbed(0.0, -0.1 - 1.9 * U(gen))); break;
      case 2: pool.push_back(DiffusionCoefficient::log_perturbed(0.2 + 0.7 * U(gen), -2.0 + 4.0 * U(gen))); break;
      case 3: pool.push_back(DiffusionCoefficient::log_perturbed(1.0, 0.3 + 2.7 * U(gen))); break;
      default: pool.push_back(DiffusionCoefficient::iterated_log(0.5 + 1.5 * U(gen), 1.2 + U(gen))); break;
    }
  }
  std::vector<Envelope> envs;
  for (const auto& c : pool) envs.emplace_back(c);
  for (int i = 0; i < 10000; ++i) {
    const std::size_t j = static_cast<std::size_t>(U(gen) * static_cast<double>(pool.size())) % pool.size();
    const double k = std::pow(10.0, -2.0 + 4.0 * U(gen));
    const double b = 5.0 * U(gen);
    const auto& c = pool[j];
    const double bound = solve_concave_inequality(envs[j], k, b);
    std::ostringstream os;
    os << c.describe() << " k=" << k << " b=" << b << ": ";
    try {
      const double x = fixed_point_oracle([&](double v) { return c.rho_p(2.0, v); }, k, b);
      os << "fixed point " << x << " > bound " << bound;
      note(r, x <= bound * (1.0 + 1e-9) + 1e-12, os.str());
    } catch (const DivergenceError&) {
      // the fixed point lies beyond double range, so the bound must too
      os << "fixed point beyond 1e300 but bound " << bound;
      note(r, !(bound < 1e300), os.str());
    }
  }
  const double xs = fixed_point_oracle([](double v) { return 0.4 * std::sqrt(v); }, 1.0, 0.125);
  note(r, std::abs(xs - 0.367481) <= 1e-5, "motivating fixed point " + std::to_string(xs));
  const double nb = newton_step_bound(0.4, 0.125, 0.5);
  note(r, nb == 0.41 || std::abs(nb - 0.41) <= 1e-15, "newton bound " + std::to_string(nb));
  return r;
}

SuiteResult h_suite() {
  SuiteResult r;
  r.name = "h";
  std::vector<CorrelationKernel> ks = {CorrelationKernel::white(1), CorrelationKernel::constant(1)};
  for (double a : {0.25, 0.5, 0.75}) ks.push_back(CorrelationKernel::riesz(a, 1));
  ks.push_back(CorrelationKernel::riesz(1.0, 2));
  ks.push_back(CorrelationKernel::riesz(1.5, 3));
  for (int d : {1, 2, 3}) ks.push_back(CorrelationKernel::ornstein_uhlenbeck(2.0, d));
  const auto ts = log_grid(1e-2, 1e2, 50);
  for (const auto& k : ks) {
    for (double t : ts) {
      const auto closed = h_heat_closed(k, t);
      if (!closed) continue;
      const double q = h_heat_quadrature(k, t);
      std::ostringstream os;
      os << k.describe() << " d=" << k.dim() << " t=" << t << ": quadrature " << q << " closed " << *closed;
      note(r, rel_err(q, *closed) <= 1e-6, os.str());
    }
  }
  for (const auto& k : {CorrelationKernel::white(1), CorrelationKernel::constant(1), CorrelationKernel::riesz(0.5, 1)}) {
    for (double t : ts) {
      const auto closed = h_wave_closed(k, t);
      if (!closed) continue;
      const double q = h_wave_quadrature(k, t);
      std::ostringstream os;
      os << "wave " << k.describe() << " t=" << t << ": quadrature " << q << " closed " << *closed;
      note(r, rel_err(q, *closed) <= 1e-6, os.str());
    }
  }
  return r;
}

SuiteResult noise_suite(std::uint64_t seed) {
  SuiteResult r;
  r.name = "noise";
  const double dx = 0.05, dt = 0.01;
  {
    NoiseSampler s(CorrelationKernel::white(1), dx, dt, 64);
    NormalStream rng(seed, 0);
    std::vector<double> w(64);
    const std::size_t draws = 100000;
    std::vector<double> sq(draws);
    for (std::size_t i = 0; i < draws; ++i) {
      s.sample(rng, w.data());
      sq[i] = w[7] * w[7];
    }
    const Estimate e = batch_mean(sq, 20);
    std::ostringstream os;
    os << "white cell variance " << e.value << " +- " << e.se << " vs " << dt / dx;
    note(r, std::abs(e.value - dt / dx) <= 3.0 * e.se, os.str());
  }
  {
    NoiseSampler s(CorrelationKernel::constant(1), dx, dt, 64);
    NormalStream rng(seed, 1);
    std::vector<double> w(64);
    s.sample(rng, w.data());
    bool same = true;
    for (double v : w) same = same && std::abs(v - w[0]) <= 1e-15;
    note(r, same, "constant noise is not rank one");
  }
  {
    const std::size_t n = 256;
    NoiseSampler s(CorrelationKernel::riesz(0.5, 1), dx, dt, n);
    NormalStream rng(seed, 2);
    std::vector<double> w(n);
    const std::size_t draws = 20000;
    const std::vector<std::size_t> lags = {0, 1, 4, 16};
    std::vector<std::vector<double>> prod(lags.size(), std::vector<double>(draws));
    for (std::size_t i = 0; i < draws; ++i) {
      s.sample(rng, w.data());
      for (std::size_t l = 0; l < lags.size(); ++l) prod[l][i] = w[100] * w[100 + lags[l]];
    }
    for (std::size_t l = 0; l < lags.size(); ++l) {
      const Estimate e = batch_mean(prod[l], 20);
      const double want = dt * s.cell_covariance(lags[l]);
      std::ostringstream os;
      os << "riesz lag " << lags[l] << " covariance " << e.value << " +- " << e.se << " vs " << want;
      note(r, std::abs(e.value - want) <= 3.0 * e.se, os.str());
    }
  }
  return r;
}

}  // namespace

std::vector<std::string> suite_names() { return {"envelope", "gamma", "h", "noise"}; }

SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
  if (name == "envelope") return envelope_suite();
  if (name == "gamma") return gamma_suite(seed);
  if (name == "h") return h_suite();
  if (name == "noise") return noise_suite(seed);
  throw SpecError("unknown suite '" + name + "' (envelope, gamma, h, noise, all)");
}

}  // namespace subspde::tools
