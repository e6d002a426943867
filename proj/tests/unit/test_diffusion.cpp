#include <cmath>
#include <limits>

#include "doctest.h"
#include "generators.hpp"
#include "subspde/diffusion.hpp"
#include "subspde/errors.hpp"

using namespace subspde;

TEST_CASE("ratio-power evaluates |u| / (r + |u|)^(1 - alpha)") {
  const auto sq = DiffusionCoefficient::ratio_power(0.5, 0.0);
  CHECK(sq(4.0) == doctest::Approx(2.0));
  CHECK(sq(-9.0) == doctest::Approx(3.0));
  CHECK(sq(0.0) == 0.0);
  const auto bdd = DiffusionCoefficient::ratio_power(0.0, 1.0);
  CHECK(bdd(3.0) == doctest::Approx(0.75));
  CHECK(bdd.sup_abs().has_value());
  CHECK(*bdd.sup_abs() == doctest::Approx(1.0));
  CHECK_FALSE(sq.sup_abs().has_value());
}

TEST_CASE("log-perturbed and iterated-log evaluate their defining formulas") {
  const auto lp = DiffusionCoefficient::log_perturbed(0.5, 0.5);
  const double u = 7.0;
  CHECK(lp(u) == doctest::Approx(std::sqrt(u) * std::pow(std::log(std::exp(1.0) + u * u), -0.5)).epsilon(1e-14));
  const auto il = DiffusionCoefficient::iterated_log(1.0, 2.0);
  const double ll = std::log(std::log(std::exp(1.0) + u * u));
  CHECK(il(u) == doctest::Approx(u * std::exp(-ll * ll)).epsilon(1e-14));
}

TEST_CASE("apply matches pointwise evaluation") {
  test::Gen g(11);
  for (int rep = 0; rep < 20; ++rep) {
    const auto c = g.coefficient();
    std::vector<double> in(64), out(64);
    for (double& v : in) v = g.uniform(-50.0, 50.0);
    c.apply(in, out);
    for (std::size_t i = 0; i < in.size(); ++i) CHECK(out[i] == doctest::Approx(c(in[i])).epsilon(1e-14));
  }
}

TEST_CASE("family parameters outside the admissible set are rejected") {
  CHECK_THROWS_AS(DiffusionCoefficient::ratio_power(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(DiffusionCoefficient::ratio_power(0.5, -1.0), DomainError);
  CHECK_THROWS_AS(DiffusionCoefficient::log_perturbed(0.0, 0.5), DomainError);
  CHECK_THROWS_AS(DiffusionCoefficient::log_perturbed(1.0, -0.5), DomainError);
  CHECK_THROWS_AS(DiffusionCoefficient::iterated_log(0.0, 2.0), DomainError);
}

TEST_CASE("rho_p symmetrizes the p-th power") {
  const auto c = DiffusionCoefficient::custom([](double u) { return u > 0 ? std::sqrt(u) : 0.5 * std::sqrt(-u); }, 0.0);
  CHECK(c.rho_p(2.0, 4.0) == doctest::Approx(2.0 + 0.5));
  CHECK(c.rho_p(3.0, 8.0) == doctest::Approx(std::pow(std::sqrt(2.0), 3) * (1.0 + 0.125)));
  CHECK_THROWS_AS(c.rho_p(2.0, -1.0), DomainError);
}

// M0 references: root of rho'' by mpmath findroot at 30 digits.
TEST_CASE("concavity thresholds of the reference coefficients") {
  CHECK(DiffusionCoefficient::ratio_power(0.5, 0.0).thresholds().M0 == 0.0);
  CHECK(DiffusionCoefficient::ratio_power(0.0, 1.0).thresholds().M0 == 0.0);
  CHECK(DiffusionCoefficient::log_perturbed(1.0, 0.5).thresholds().M0 == 0.0);
  CHECK(DiffusionCoefficient::log_perturbed(1.0, 5.0).thresholds().M0 == doctest::Approx(403.304089765).epsilon(1e-6));
  CHECK(DiffusionCoefficient::iterated_log(1.0, 2.0).thresholds().M0 == doctest::Approx(199.326937874).epsilon(1e-6));
  const auto th = DiffusionCoefficient::log_perturbed(1.0, 5.0).thresholds();
  CHECK(th.M >= th.M0);
  CHECK(th.K_M > 0.0);
}

// |rho| is concave on [M0, inf) and every rho_p is concave on [M^p, inf).
TEST_CASE("property: rho_p is concave beyond M^p") {
  test::Gen g(20240601);
  int checked = 0;
  for (int rep = 0; rep < 60; ++rep) {
    const auto c = g.coefficient();
    const auto th = c.thresholds();
    for (double p : {2.0, 3.0, 4.0}) {
      const double lo = std::max(std::pow(th.M, p), 1e-6);
      for (int k = 0; k < 20; ++k) {
        const double a = lo * g.log_uniform(1.0, 1e6);
        const double b = a * g.log_uniform(1.0 + 1e-3, 1e3);
        const double m = 0.5 * (a + b);
        const double mid = c.rho_p(p, m);
        const double chord = 0.5 * (c.rho_p(p, a) + c.rho_p(p, b));
        INFO(c.describe(), " p=", p, " a=", a, " b=", b);
        CHECK(mid >= chord * (1.0 - 1e-10));
        ++checked;
      }
    }
  }
  CHECK(checked == 60 * 3 * 20);
}

TEST_CASE("subgradient is nonincreasing beyond M0^p") {
  const auto c = DiffusionCoefficient::log_perturbed(0.5, 0.5);
  double prev = std::numeric_limits<double>::infinity();
  for (double x = 1.0; x < 1e8; x *= 3.0) {
    const double g = subgradient_gp(c, 2.0, x);
    CHECK(g <= prev * (1.0 + 1e-6));
    prev = g;
  }
}

TEST_CASE("custom coefficients are checked against the hypotheses") {
  CHECK(validate_coefficient([](double u) { return std::sqrt(std::abs(u)); }, 0.0).ok());
  const auto lin = validate_coefficient([](double u) { return u; }, 0.0);
  CHECK_FALSE(lin.sublinear);
  try {
    (void)DiffusionCoefficient::custom([](double u) { return u * u; }, 0.0);
    FAIL("expected a precondition error");
  } catch (const PreconditionError& e) {
    CHECK(e.hypothesis() == "rho-sublinear");
  }
}

TEST_CASE("a custom evaluator returning nan is reported") {
  try {
    (void)DiffusionCoefficient::custom(
        [](double u) { return u > 1e3 && u < 2e3 ? std::numeric_limits<double>::quiet_NaN() : std::sqrt(std::abs(u)); },
        0.0, std::nullopt, "holey");
    FAIL("expected a precondition error");
  } catch (const PreconditionError& e) {
    CHECK(e.hypothesis() == "rho-locally-bounded");
  }
  const auto c = DiffusionCoefficient::custom(
      [](double u) { return u > 1e13 ? std::numeric_limits<double>::quiet_NaN() : std::sqrt(std::abs(u)); }, 0.0,
      std::nullopt, "far-hole");
  CHECK_THROWS_AS(c(2e13), EvaluationError);
}
