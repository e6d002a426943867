#include <cmath>
#include <numbers>

#include "doctest.h"
#include "subspde/errors.hpp"
#include "subspde/noise.hpp"
#include "subspde/presets.hpp"

using namespace subspde;
using std::numbers::pi;

// Reference values from an independent 25-digit mpmath evaluation of
// h(t) = int_0^inf f(z) G(z, 2t) dz with G(z, T) = int_0^T p_s(z) ds in closed
// form (d = 1), and of the spectral and wave integrals.
TEST_CASE("h(t) against high-precision references") {
  CHECK(h_heat(CorrelationKernel::riesz(0.5, 1), 1.0) == doctest::Approx(1.928545446176098).epsilon(1e-9));
  CHECK(h_heat(CorrelationKernel::riesz(0.25, 1), 3.0) == doctest::Approx(3.361002825500153).epsilon(1e-9));
  CHECK(h_heat(CorrelationKernel::ornstein_uhlenbeck(2.0, 1), 1.0) == doctest::Approx(0.6180339887498948).epsilon(1e-9));
  CHECK(h_heat(CorrelationKernel::ornstein_uhlenbeck(1.0, 1), 2.0) == doctest::Approx(0.9319731240520719).epsilon(1e-7));
  CHECK(h_heat(CorrelationKernel::bessel_spectral(1.0, 1), 1.0) == doctest::Approx(0.8070063622432389).epsilon(1e-7));
  CHECK(h_heat(CorrelationKernel::bessel_potential(1.5, 1), 1.0) == doctest::Approx(0.3116206237701964).epsilon(1e-7));
  CHECK(h_heat(CorrelationKernel::bessel_potential(1.5, 1), 2.0) == doctest::Approx(0.5089466114085667).epsilon(1e-7));
  CHECK(h_wave(CorrelationKernel::riesz(0.5, 1), 1.0) == doctest::Approx(0.7542472332656467).epsilon(1e-9));
  CHECK(h_wave(CorrelationKernel::ornstein_uhlenbeck(1.0, 1), 1.5) == doctest::Approx(0.6125532329080340).epsilon(1e-7));
}

TEST_CASE("trivial closed forms") {
  CHECK(h_heat(CorrelationKernel::white(1), pi) == doctest::Approx(1.0));
  CHECK(h_heat(CorrelationKernel::constant(1), 2.5) == doctest::Approx(2.5));
  CHECK(h_wave(CorrelationKernel::constant(1), 3.0) == doctest::Approx(9.0));
  CHECK(h_wave(CorrelationKernel::white(1), 2.0) == doctest::Approx(1.0));
  CHECK(k_eval(CorrelationKernel::white(1), 2.0) == doctest::Approx(1.0 / (2.0 * std::sqrt(pi))));
  CHECK(h_heat(CorrelationKernel::white(1), 0.0) == 0.0);
}

TEST_CASE("quadrature reproduces the closed forms") {
  std::vector<CorrelationKernel> ks = {CorrelationKernel::white(1), CorrelationKernel::riesz(0.5, 1),
                                       CorrelationKernel::riesz(1.0, 2), CorrelationKernel::riesz(1.5, 3)};
  for (int d : {1, 2, 3}) ks.push_back(CorrelationKernel::ornstein_uhlenbeck(2.0, d));
  for (const auto& k : ks) {
    for (double t : {0.01, 0.3, 1.0, 7.0, 100.0}) {
      const auto closed = h_heat_closed(k, t);
      REQUIRE(closed.has_value());
      INFO(k.describe(), " d=", k.dim(), " t=", t);
      CHECK(h_heat_quadrature(k, t) == doctest::Approx(*closed).epsilon(1e-6));
    }
  }
}

TEST_CASE("k is the derivative of h at t/2") {
  for (const auto& k : {CorrelationKernel::riesz(0.5, 1), CorrelationKernel::ornstein_uhlenbeck(1.0, 1),
                        CorrelationKernel::bessel_spectral(1.0, 1)}) {
    const double t = 1.3, e = 1e-4;
    const double dh = (h_heat(k, 0.5 * t + e) - h_heat(k, 0.5 * t - e)) / (2.0 * e);
    INFO(k.describe());
    CHECK(k_eval(k, t) == doctest::Approx(dh).epsilon(1e-5));
  }
}

TEST_CASE("Dalang condition") {
  CHECK(dalang_check(CorrelationKernel::white(1)).ok);
  CHECK_FALSE(dalang_check(CorrelationKernel::white(2)).ok);
  CHECK(dalang_check(CorrelationKernel::riesz(1.5, 3)).ok);
  CHECK_FALSE(dalang_check(CorrelationKernel::riesz(2.5, 3)).ok);
  CHECK(dalang_check(CorrelationKernel::bessel_potential(1.5, 2)).ok);
  CHECK_FALSE(dalang_check(CorrelationKernel::bessel_potential(0.5, 3)).ok);
  try {
    (void)h_heat(CorrelationKernel::white(2), 1.0);
    FAIL("expected a precondition error");
  } catch (const PreconditionError& e) {
    CHECK(e.hypothesis() == "dalang");
  }
}

TEST_CASE("heat kernel is a probability density") {
  double s = 0.0;
  const double dz = 1e-3;
  for (double z = -20.0; z < 20.0; z += dz) s += heat_kernel(2.0, std::abs(z)) * dz;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("property: h is nondecreasing with the expected power law for Riesz") {
  for (double a : {0.2, 0.5, 0.9}) {
    const auto k = CorrelationKernel::riesz(a, 1);
    const auto ts = log_grid(1.0, 1e4, 20);
    std::vector<double> hs;
    for (double t : ts) hs.push_back(h_heat_quadrature(k, t));
    for (std::size_t i = 1; i < hs.size(); ++i) CHECK(hs[i] > hs[i - 1]);
    CHECK(growth_exponent(GrowthKind::Power, ts, hs) == doctest::Approx(1.0 - 0.5 * a).epsilon(1e-6));
  }
}

TEST_CASE("kernel names round trip") {
  for (auto v : {KernelVariant::SpaceTimeWhite, KernelVariant::Constant, KernelVariant::Riesz,
                 KernelVariant::OrnsteinUhlenbeck, KernelVariant::BesselPotential, KernelVariant::BesselSpectral})
    CHECK(kernel_variant_from_string(to_string(v)) == v);
  CHECK_THROWS_AS(kernel_variant_from_string("pink"), SpecError);
}
