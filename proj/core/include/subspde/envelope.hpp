#pragma once

#include <functional>

#include "subspde/diffusion.hpp"

namespace subspde {

// F(x) = x / (4 rho_2(x)) on [M^2, inf) and its right inverse
// F^{-1}(y) = inf{x >= 2M^2 : F(x) >= y}.
class Envelope {
 public:
  explicit Envelope(DiffusionCoefficient coeff);

  const DiffusionCoefficient& coefficient() const { return coeff_; }

  // +infinity when rho_2(x) = 0 and x > 0.
  double F(double x) const;
  double F_inverse(double y) const;
  // Always the scan-then-bisect route, even when a closed form exists.
  double F_inverse_numeric(double y) const;
  bool has_closed_form() const;
  // Closed form without the 2M^2 floor check; throws UnsupportedError when
  // the family has none.
  double F_inverse_closed(double y) const;
  double floor() const { return 2.0 * M_ * M_; }

 private:
  double F_unchecked(double x) const;

  DiffusionCoefficient coeff_;
  double M_;
};

double F_eval(const Envelope& env, double x);
double F_inverse(const Envelope& env, double y);

// Certified bound 2 F^{-1}(k) + 2b on every x >= 0 with x <= k rho_2(x) + b.
double solve_concave_inequality(const Envelope& env, double k, double b);

// Largest root of x = k rho2(x) + b by doubling then bisection. Brute-force
// reference for solve_concave_inequality.
double fixed_point_oracle(const std::function<double(double)>& rho2, double k, double b);

// k^{1/(1-a)} + b/(1-a): one Newton step from infinity for x = k x^a + b.
double newton_step_bound(double k, double b, double a);

}  // namespace subspde
