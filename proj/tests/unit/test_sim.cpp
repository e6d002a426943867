#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "subspde/errors.hpp"
#include "subspde/sim.hpp"

using namespace subspde;
using std::numbers::pi;

namespace {

SimulationConfig small_config() {
  SimulationConfig c;
  c.n = 128;
  c.L = 3.2;
  c.snapshot_times = {0.5, 1.0};
  c.paths = 200;
  c.batches = 10;
  c.dt = 0.005;
  c.seed = 99;
  return c;
}

DiffusionCoefficient zero_rho() {
  return DiffusionCoefficient::custom([](double) { return 0.0; }, 0.0, 0.0, "zero");
}

DiffusionCoefficient unit_rho() {
  return DiffusionCoefficient::custom([](double) { return 1.0; }, 0.0, 1.0, "one");
}

std::string csv(const PathEnsemble& e) {
  std::ostringstream os;
  write_ensemble_csv(e, os);
  return os.str();
}

}  // namespace

TEST_CASE("configuration invariants") {
  auto c = small_config();
  CHECK_NOTHROW(c.validate());
  auto bad = c;
  bad.n = 127;
  CHECK_THROWS_AS(bad.validate(), SpecError);
  bad = c;
  bad.snapshot_times = {};
  CHECK_THROWS_AS(bad.validate(), SpecError);
  bad = c;
  bad.snapshot_times = {1.0, 0.5};
  CHECK_THROWS_AS(bad.validate(), SpecError);
  bad = c;
  bad.snapshot_times = {0.5, 0.5 + 0.001};
  CHECK_THROWS_AS(bad.validate(), SpecError);

  auto hyp = [](const SimulationConfig& s) {
    try {
      s.validate();
    } catch (const PreconditionError& e) {
      return e.hypothesis();
    }
    return std::string("none");
  };
  bad = c;
  bad.scheme = HeatScheme::Explicit;
  bad.dt = 0.01;
  CHECK(hyp(bad) == "explicit-stability");
  bad = c;
  bad.equation = SimEquation::Wave;
  bad.dt = 0.1;
  CHECK(hyp(bad) == "cfl");
  bad = c;
  bad.kernel = CorrelationKernel::white(2);
  CHECK_THROWS_AS(simulate(bad), Error);
}

TEST_CASE("default steps per scheme") {
  auto c = small_config();
  c.dt = 0.0;
  const double dx = c.dx();
  c.scheme = HeatScheme::Implicit;
  CHECK(c.step() <= dx * dx * (1.0 + 1e-12));
  c.scheme = HeatScheme::Explicit;
  CHECK(c.step() <= 0.5 * dx * dx * (1.0 + 1e-12));
  c.equation = SimEquation::Wave;
  CHECK(c.step() <= 0.5 * dx * (1.0 + 1e-12));
  for (std::size_t s : c.snapshot_steps()) CHECK(s > 0);
}

// With rho = 0 and u0 = exp(-x^2) the solution is exp(-x^2/(1+2t)) / sqrt(1+2t).
TEST_CASE("deterministic heat flow in every scheme") {
  for (auto scheme : {HeatScheme::Explicit, HeatScheme::Implicit, HeatScheme::Spectral}) {
    auto c = small_config();
    c.L = 6.4;
    c.n = 256;
    c.paths = 2;
    c.batches = 2;
    c.scheme = scheme;
    c.dt = scheme == HeatScheme::Implicit ? 1e-4 : 0.0;
    c.coeff = zero_rho();
    c.init = InitialCondition::custom([](double x) { return std::exp(-x * x); }, "gauss");
    c.keep_path0 = true;
    const auto e = simulate(c);
    REQUIRE(e.path0.size() == 2);
    const double t = 1.0;
    const auto& u = e.path0[1];
    for (std::size_t i = 0; i < c.n; i += 16) {
      const double x = c.x_at(i);
      const double want = std::exp(-x * x / (1.0 + 2.0 * t)) / std::sqrt(1.0 + 2.0 * t);
      INFO(to_string(scheme), " x=", x);
      CHECK(u[i] == doctest::Approx(want).epsilon(2e-3).scale(1.0));
    }
  }
}

TEST_CASE("additive white noise reproduces the lattice variance") {
  auto c = small_config();
  c.coeff = unit_rho();
  c.paths = 1000;
  c.batches = 20;
  const auto e = simulate(c);
  const auto cm = estimate_central_moments(e, {2});
  for (const auto& row : cm) {
    const double h = std::sqrt(row.t / pi);
    INFO("t=", row.t, " var=", row.point.value, " se=", row.point.se);
    // spatial discretization lowers the variance by O(dx^{1/2})
    CHECK(std::abs(row.point.value - h) <= 3.0 * row.point.se + 0.6 * std::sqrt(c.dx()));
  }
}

TEST_CASE("property: mean preservation and positivity") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    auto c = small_config();
    c.seed = seed;
    c.paths = 400;
    c.batches = 20;
    const auto m = estimate_moments(simulate(c), {1.0});
    for (const auto& row : m.rows) {
      INFO("seed ", seed, " t=", row.t);
      CHECK(std::abs(row.pooled.value - 1.0) <= 4.0 * row.pooled.se);
    }
    c.positivity_clip = true;
    c.paths = 50;
    const auto e = simulate(c);
    for (const auto& p : e.paths)
      for (double v : p.field_min) CHECK(v >= 0.0);
  }
}

TEST_CASE("property: bit-exact results for any thread count") {
  auto c = small_config();
  c.paths = 37;
  c.kernel = CorrelationKernel::riesz(0.5, 1);
  c.threads = 1;
  const std::string one = csv(simulate(c));
  for (unsigned th : {2u, 3u, 8u}) {
    c.threads = th;
    CHECK(csv(simulate(c)) == one);
  }
  c.seed += 1;
  CHECK(csv(simulate(c)) != one);
}

TEST_CASE("wave equation with additive noise") {
  auto c = small_config();
  c.equation = SimEquation::Wave;
  c.L = 6.4;
  c.n = 256;
  c.dt = 0.025;
  c.coeff = unit_rho();
  c.paths = 600;
  c.batches = 20;
  const auto e = simulate(c);
  for (const auto& row : estimate_central_moments(e, {2})) {
    const double want = 0.25 * row.t * row.t;
    INFO("t=", row.t, " var=", row.point.value, " se=", row.point.se);
    CHECK(std::abs(row.point.value - want) <= 3.0 * row.point.se + 0.05 * want);
  }
}

TEST_CASE("constant noise moves the whole field together") {
  auto c = small_config();
  c.kernel = CorrelationKernel::constant(1);
  c.coeff = unit_rho();
  c.paths = 3;
  c.batches = 2;
  c.keep_path0 = true;
  const auto e = simulate(c);
  for (const auto& snap : e.path0)
    for (double v : snap) CHECK(v == doctest::Approx(snap[0]).epsilon(1e-9));
}

TEST_CASE("colored noise sampler covariance") {
  const double dx = 0.05, dt = 0.01;
  NoiseSampler s(CorrelationKernel::ornstein_uhlenbeck(1.0, 1), dx, dt, 128);
  NormalStream rng(4, 0);
  std::vector<double> w(128);
  const int draws = 20000;
  double c0 = 0.0, c8 = 0.0;
  for (int i = 0; i < draws; ++i) {
    s.sample(rng, w.data());
    c0 += w[40] * w[40];
    c8 += w[40] * w[48];
  }
  c0 /= draws;
  c8 /= draws;
  CHECK(c0 == doctest::Approx(dt * s.cell_covariance(0)).epsilon(0.05));
  CHECK(c8 == doctest::Approx(dt * s.cell_covariance(8)).epsilon(0.06));
  // OU with alpha = 1 at lag 0.4 is close to exp(-0.4)
  CHECK(s.cell_covariance(8) == doctest::Approx(std::exp(-0.4)).epsilon(5e-3));
}

TEST_CASE("estimators") {
  const std::vector<double> v = {1, 2, 3, 4, 5, 6, 7, 8};
  const auto e = batch_mean(v, 4);
  CHECK(e.value == doctest::Approx(4.5));
  // block means 1.5 3.5 5.5 7.5: sd = sqrt(20/3), se = sd / 2
  CHECK(e.se == doctest::Approx(std::sqrt(20.0 / 3.0) / 2.0));
  const auto [slope, icpt] = linear_fit({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(slope == doctest::Approx(2.0));
  CHECK(icpt == doctest::Approx(1.0));
}

TEST_CASE("tail, sup and Holder estimators on a small ensemble") {
  auto c = small_config();
  c.tail_levels = {1.5, 2.0};
  c.sup_radii = {0.5, 1.0};
  c.paths = 300;
  c.batches = 10;
  const auto e = simulate(c);

  const auto tail = estimate_tail(e, 1.0, {0.5, 1.5, 2.0, 50.0});
  REQUIRE(tail.size() == 4);
  CHECK(tail[0].frequency >= tail[1].frequency);
  CHECK(tail[1].wilson_lo <= tail[1].frequency);
  CHECK(tail[1].wilson_hi >= tail[1].frequency);
  CHECK(tail[1].pooled.has_value());
  CHECK_FALSE(tail[0].pooled.has_value());
  CHECK(tail[3].censored);
  CHECK_THROWS_AS(estimate_tail(e, 1.0, {}), EstimatorError);

  const auto sup = estimate_spatial_sup(e, 1.0, {0.5, 1.0});
  REQUIRE(sup.size() == 2);
  CHECK(sup[1].mean.value >= sup[0].mean.value);
  CHECK(sup[0].q90 >= sup[0].median);
  CHECK_THROWS_AS(estimate_spatial_sup(e, 1.0, {0.7}), SpecError);

  // white-noise solutions are 1/2-Holder in space: E|du|^2 ~ delta
  const auto hf = estimate_holder(e, 1.0);
  CHECK(hf.slope == doctest::Approx(1.0).epsilon(0.25));
  CHECK(hf.eta2 == doctest::Approx(0.5 * hf.slope));
}

TEST_CASE("snapshot binary layout") {
  auto c = small_config();
  c.paths = 2;
  c.batches = 2;
  c.keep_path0 = true;
  const auto e = simulate(c);
  std::ostringstream os;
  write_snapshot_binary(e, os);
  const std::string s = os.str();
  REQUIRE(s.size() == 4 + 4 + 8 + 8 + 8 + 8 + 2 * 8 + 2 * c.n * 8);
  CHECK(s.substr(0, 4) == "SSPD");
  std::uint32_t version;
  std::uint64_t n, ns;
  double dx, dt, t1;
  std::memcpy(&version, s.data() + 4, 4);
  std::memcpy(&n, s.data() + 8, 8);
  std::memcpy(&ns, s.data() + 16, 8);
  std::memcpy(&dx, s.data() + 24, 8);
  std::memcpy(&dt, s.data() + 32, 8);
  std::memcpy(&t1, s.data() + 48, 8);
  CHECK(version == 1);
  CHECK(n == c.n);
  CHECK(ns == 2);
  CHECK(dx == c.dx());
  CHECK(dt == e.dt);
  CHECK(t1 == 1.0);
  auto no_keep = c;
  no_keep.keep_path0 = false;
  std::ostringstream os2;
  CHECK_THROWS_AS(write_snapshot_binary(simulate(no_keep), os2), SpecError);
}
