#include "subspde/envelope.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "subspde/errors.hpp"

namespace subspde {

namespace {

constexpr double kE = 2.718281828459045235;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRelTol = 1e-12;

}  // namespace

Envelope::Envelope(DiffusionCoefficient coeff)
    : coeff_(std::move(coeff)), M_(coeff_.thresholds().M) {}

double Envelope::F_unchecked(double x) const {
  if (x == 0.0) {
    if (coeff_.rho_p(2.0, 0.0) > 0.0) return 0.0;
    // limit x -> 0+ of x / (4 rho_2(x))
    x = 1e-200;
  }
  const double r2 = coeff_.rho_p(2.0, x);
  if (r2 == 0.0) return kInf;
  return x / (4.0 * r2);
}

double Envelope::F(double x) const {
  const double m2 = M_ * M_;
  if (!(x >= m2 * (1.0 - 1e-12))) {
    std::ostringstream os;
    os << "F is defined on [M^2, inf) = [" << m2 << ", inf); got x=" << x;
    throw DomainError(os.str());
  }
  return F_unchecked(x);
}

bool Envelope::has_closed_form() const {
  switch (coeff_.family()) {
    case Family::RatioPower: return true;
    case Family::LogPerturbed: return coeff_.params().alpha == 1.0;
    case Family::IteratedLog: return true;
    case Family::Custom: return false;
  }
  return false;
}

double Envelope::F_inverse_closed(double y) const {
  const auto& p = coeff_.params();
  switch (coeff_.family()) {
    case Family::RatioPower: {
      const double e = 1.0 - p.alpha;
      if (y < std::pow(p.r, 2.0 * e) / 8.0) return 0.0;
      const double s = std::pow(8.0 * y, 1.0 / (2.0 * e)) - p.r;
      return s * s;
    }
    case Family::LogPerturbed:
      if (p.alpha != 1.0) break;
      if (y < 0.125) return 0.0;
      // exp(s) - e written as e expm1(s - 1) to keep precision near y = 1/8
      return kE * std::expm1(std::expm1(std::log(8.0 * y) / (2.0 * p.beta)));
    case Family::IteratedLog:
      if (y < 0.125) return 0.0;
      return kE * std::expm1(std::expm1(std::pow(std::log(8.0 * y) / (2.0 * p.beta), 1.0 / p.kappa)));
    case Family::Custom: break;
  }
  throw UnsupportedError("no closed-form F^{-1} for " + coeff_.describe());
}

double Envelope::F_inverse(double y) const {
  if (!(y >= 0.0)) throw DomainError("F^{-1} needs y >= 0");
  if (y == kInf) return kInf;
  if (has_closed_form()) return std::max(floor(), F_inverse_closed(y));
  return F_inverse_numeric(y);
}

double Envelope::F_inverse_numeric(double y) const {
  if (!(y >= 0.0)) throw DomainError("F^{-1} needs y >= 0");
  if (y == kInf) return kInf;
  const double lo = floor();
  if (F_unchecked(lo) >= y) return lo;

  double hi = std::max(2.0 * lo, 1.0);
  while (F_unchecked(hi) < y) {
    if (hi > std::numeric_limits<double>::max() / 4.0) {
      std::ostringstream os;
      os << "F stays below y=" << y << " on all representable x for " << coeff_.describe();
      throw DivergenceError(os.str());
    }
    hi *= 2.0;
  }

  // Leftmost crossing: geometric pre-scan of 64 points on (lo, hi].
  const double start = lo > 0.0 ? lo : hi * 1e-300;
  double a = lo, b = hi;
  if (F_unchecked(start) >= y) {
    b = start;
  } else {
    const double ratio = std::log(hi / start) / 64.0;
    double prev = start;
    for (int j = 1; j <= 64; ++j) {
      const double xj = j == 64 ? hi : start * std::exp(ratio * j);
      if (F_unchecked(xj) >= y) {
        a = prev;
        b = xj;
        break;
      }
      prev = xj;
    }
  }
  for (int it = 0; it < 4000 && (b - a) > kRelTol * b; ++it) {
    // geometric midpoint while the bracket spans orders of magnitude
    const double m = (a > 0.0 && b / a > 4.0) ? std::sqrt(a * b) : a + 0.5 * (b - a);
    if (F_unchecked(m) >= y)
      b = m;
    else
      a = m;
  }
  return b;
}

double F_eval(const Envelope& env, double x) { return env.F(x); }
double F_inverse(const Envelope& env, double y) { return env.F_inverse(y); }

double solve_concave_inequality(const Envelope& env, double k, double b) {
  if (!(k > 0.0)) throw DomainError("concave inequality: k must be positive");
  if (!(b >= 0.0)) throw DomainError("concave inequality: b must be >= 0");
  return 2.0 * env.F_inverse(k) + 2.0 * b;
}

double fixed_point_oracle(const std::function<double(double)>& rho2, double k, double b) {
  if (!(k > 0.0)) throw DomainError("fixed point oracle: k must be positive");
  if (!(b >= 0.0)) throw DomainError("fixed point oracle: b must be >= 0");
  auto g = [&](double x) { return x - k * rho2(x) - b; };

  double hi = std::max(b, 1.0);
  for (;;) {
    const double gh = g(hi);
    if (gh > 0.0 && g(2.0 * hi) > gh) break;
    hi *= 2.0;
    if (hi > 1e300) throw DivergenceError("fixed point oracle: no bracket below 1e300");
  }

  const double factor = std::exp2(-1.0 / 16.0);
  double upper = hi, lower = b;
  for (double x = hi;;) {
    double xn = x * factor;
    if (xn <= b) xn = b;
    if (g(xn) <= 0.0) {
      lower = xn;
      upper = x;
      break;
    }
    if (xn == b) {
      // g(b) = -k rho2(b) <= 0 always, so this only guards against nan
      throw EvaluationError("fixed point oracle: g(b) > 0");
    }
    x = xn;
  }
  for (int it = 0; it < 4000 && (upper - lower) > kRelTol * upper; ++it) {
    const double m = lower + 0.5 * (upper - lower);
    if (g(m) > 0.0)
      upper = m;
    else
      lower = m;
  }
  return 0.5 * (lower + upper);
}

double newton_step_bound(double k, double b, double a) {
  if (!(a >= 0.0 && a < 1.0)) throw DomainError("newton step bound: a must lie in [0,1)");
  if (!(k > 0.0)) throw DomainError("newton step bound: k must be positive");
  if (!(b >= 0.0)) throw DomainError("newton step bound: b must be >= 0");
  return std::pow(k, 1.0 / (1.0 - a)) + b / (1.0 - a);
}

}  // namespace subspde
