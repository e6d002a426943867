#include <cmath>

#include "doctest.h"
#include "generators.hpp"
#include "subspde/envelope.hpp"
#include "subspde/errors.hpp"

using namespace subspde;

TEST_CASE("ratio-power with r = 0 inverts to (8y)^(1/(1-alpha))") {
  // rho_2(x) = 2 x^alpha, so F(x) = x^(1-alpha) / 8
  for (double a : {0.0, 0.25, 0.5, 0.75}) {
    const Envelope env(DiffusionCoefficient::ratio_power(a, 0.0));
    for (double y : {1e-3, 0.5, 1.0, 7.0, 1e4}) {
      CHECK(env.F_inverse(y) == doctest::Approx(std::pow(8.0 * y, 1.0 / (1.0 - a))).epsilon(1e-12));
      CHECK(env.F(std::pow(8.0 * y, 1.0 / (1.0 - a))) == doctest::Approx(y).epsilon(1e-12));
    }
  }
}

TEST_CASE("closed and numeric inversions agree on every family with a closed form") {
  std::vector<DiffusionCoefficient> cs;
  for (double a : {0.0, 0.25, 0.5, 0.75})
    for (double r : {0.0, 1.0, 2.0}) cs.push_back(DiffusionCoefficient::ratio_power(a, r));
  cs.push_back(DiffusionCoefficient::log_perturbed(1.0, 1.0));
  cs.push_back(DiffusionCoefficient::log_perturbed(1.0, 5.0));
  cs.push_back(DiffusionCoefficient::iterated_log(1.0, 2.0));
  for (const auto& c : cs) {
    const Envelope env(c);
    REQUIRE(env.has_closed_form());
    for (double y = 1e-3; y <= 1e3; y *= 1.7) {
      INFO(c.describe(), " y=", y);
      CHECK(env.F_inverse(y) == doctest::Approx(env.F_inverse_numeric(y)).epsilon(1e-8));
    }
  }
}

TEST_CASE("F^{-1} respects the 2M^2 floor") {
  const Envelope env(DiffusionCoefficient::log_perturbed(1.0, 5.0));
  CHECK(env.floor() > 0.0);
  CHECK(env.F_inverse(1e-9) == doctest::Approx(env.floor()));
  CHECK_THROWS_AS(env.F(0.5 * env.floor() / 2.0 * 0.5), DomainError);
}

TEST_CASE("no closed form for the intermediate log-perturbed case") {
  const Envelope env(DiffusionCoefficient::log_perturbed(0.5, 0.5));
  CHECK_FALSE(env.has_closed_form());
  CHECK_THROWS_AS(env.F_inverse_closed(1.0), UnsupportedError);
  CHECK(env.F_inverse(10.0) == env.F_inverse_numeric(10.0));
}

// F(F^{-1}(y)) >= y for y >= 0 and F^{-1}(F(x)) <= x for x >= 2M^2.
TEST_CASE("property: Galois inequalities between F and F^{-1}") {
  test::Gen g(7);
  for (int rep = 0; rep < 200; ++rep) {
    const auto c = g.coefficient();
    const Envelope env(c);
    const double y = g.log_uniform(1e-4, 1e4);
    const double x = std::max(env.floor(), 1e-8) * g.log_uniform(1.0, 1e8);
    INFO(c.describe(), " y=", y, " x=", x);
    CHECK(env.F(env.F_inverse(y)) >= y * (1.0 - 1e-9));
    CHECK(test::galois_upper_ok([&](double v) { return env.F(v); }, x, env.F_inverse(env.F(x))));
  }
}

TEST_CASE("property: F^{-1} is nondecreasing") {
  test::Gen g(8);
  for (int rep = 0; rep < 50; ++rep) {
    const Envelope env(g.coefficient());
    double prev = 0.0;
    for (double y = 1e-3; y < 1e5; y *= 2.3) {
      const double v = env.F_inverse(y);
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("property: the concave inequality bound dominates the largest root") {
  test::Gen g(9);
  for (int rep = 0; rep < 300; ++rep) {
    const auto c = g.coefficient();
    const Envelope env(c);
    const double k = g.log_uniform(1e-2, 1e2);
    const double b = g.uniform(0.0, 5.0);
    const double bound = solve_concave_inequality(env, k, b);
    double x = 0.0;
    try {
      x = fixed_point_oracle([&](double v) { return c.rho_p(2.0, v); }, k, b);
    } catch (const DivergenceError&) {
      CHECK_FALSE(bound < 1e300);
      continue;
    }
    INFO(c.describe(), " k=", k, " b=", b);
    CHECK(x <= bound * (1.0 + 1e-9) + 1e-12);
    CHECK(x <= k * c.rho_p(2.0, x) + b + 1e-9 * x);
  }
}

TEST_CASE("square-root fixed point and its Newton bound") {
  const double x = fixed_point_oracle([](double v) { return 0.4 * std::sqrt(v); }, 1.0, 0.125);
  CHECK(x == doctest::Approx(0.367481).epsilon(1e-5));
  // exact root of x = 0.4 sqrt(x) + 1/8
  const double s = 0.5 * (0.4 + std::sqrt(0.16 + 0.5));
  CHECK(x == doctest::Approx(s * s).epsilon(1e-10));
  CHECK(newton_step_bound(0.4, 0.125, 0.5) == doctest::Approx(0.41).epsilon(1e-15));
}

TEST_CASE("inequality inputs are validated") {
  const Envelope env(DiffusionCoefficient::ratio_power(0.5, 0.0));
  CHECK_THROWS_AS(solve_concave_inequality(env, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(solve_concave_inequality(env, 1.0, -1.0), DomainError);
}
