#include "subspde/initial.hpp"

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "subspde/errors.hpp"
#include "subspde/noise.hpp"

namespace subspde {

namespace bmq = boost::math::quadrature;
using std::numbers::pi;

namespace {

constexpr double kTol = 1e-11;

double norm(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double Phi(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

template <class G>
double half_line(G g) {
  static thread_local bmq::exp_sinh<double> es;
  return es.integrate(g, kTol);
}

template <class G>
double finite(G g, double a, double b) {
  static thread_local bmq::tanh_sinh<double> ts;
  return ts.integrate(g, a, b, kTol);
}

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw EvaluationError(std::string(what) + " is not finite");
  return v;
}

// E|x + sqrt(t) Z|^{-ell} in d dims as a Poisson mixture of central moments
double power_law_series(double ell, double t, double r, int d) {
  const double lam = r * r / t;
  const double m = 0.5 * lam;
  const double spread = 20.0 * std::sqrt(m) + 50.0;
  const long j0 = static_cast<long>(std::max(0.0, std::floor(m - spread)));
  const long j1 = static_cast<long>(std::ceil(m + spread));
  double sum = 0.0;
  for (long j = j0; j <= j1; ++j) {
    const double jd = static_cast<double>(j);
    const double log_pois = (m > 0.0 ? jd * std::log(m) : (j == 0 ? 0.0 : -INFINITY)) - m -
                            std::lgamma(jd + 1.0);
    const double log_mom = -0.5 * ell * std::log(2.0) + std::lgamma(0.5 * (d + 2.0 * jd - ell)) -
                           std::lgamma(0.5 * (d + 2.0 * jd));
    sum += std::exp(log_pois + log_mom);
  }
  return sum * std::pow(t, -0.5 * ell);
}

}  // namespace

double gaussian_radial_expectation(const std::function<double(double)>& g, double r, double t, int d) {
  if (!(t > 0.0)) throw DomainError("gaussian expectation needs t > 0");
  const double st = std::sqrt(t);
  if (r == 0.0) {
    const double log_c = (1.0 - 0.5 * d) * std::log(2.0) - std::lgamma(0.5 * d);
    return half_line([&](double rho) {
      return g(st * rho) * std::exp(log_c + (d - 1) * std::log(rho) - 0.5 * rho * rho);
    });
  }
  std::function<double(double)> dens;
  if (d == 1) {
    dens = [&](double y) { return heat_kernel(t, r - y) + heat_kernel(t, r + y); };
  } else {
    boost::math::non_central_chi_squared_distribution<double> nc(d, r * r / t);
    dens = [nc, t](double rho) {
      if (rho == 0.0) return 0.0;
      return boost::math::pdf(nc, rho * rho / t) * 2.0 * rho / t;
    };
  }
  const double inner = finite([&](double y) { return g(y) * dens(y); }, 0.0, r);
  const double outer = half_line([&](double v) { return g(r + v) * dens(r + v); });
  return inner + outer;
}

std::string to_string(InitialVariant v) {
  switch (v) {
    case InitialVariant::Constant: return "constant";
    case InitialVariant::Dirac: return "dirac";
    case InitialVariant::PowerLaw: return "power-law";
    case InitialVariant::Exponential: return "exponential";
    case InitialVariant::Custom: return "custom";
  }
  return "unknown";
}

InitialVariant initial_variant_from_string(const std::string& s) {
  if (s == "constant" || s == "Constant") return InitialVariant::Constant;
  if (s == "dirac" || s == "DiracDelta") return InitialVariant::Dirac;
  if (s == "power-law" || s == "PowerLawDensity") return InitialVariant::PowerLaw;
  if (s == "exponential" || s == "ExponentialDensity") return InitialVariant::Exponential;
  throw SpecError("unknown initial condition '" + s + "'");
}

InitialCondition InitialCondition::constant(double c) {
  if (!std::isfinite(c)) throw DomainError("constant initial data must be finite");
  return InitialCondition(InitialVariant::Constant, c);
}

InitialCondition InitialCondition::dirac(double mass) {
  if (!std::isfinite(mass)) throw DomainError("dirac mass must be finite");
  return InitialCondition(InitialVariant::Dirac, mass);
}

InitialCondition InitialCondition::power_law(double ell) {
  if (!(ell > 0.0 && ell < 2.0))
    throw PreconditionError("rough-initial-data", "power-law exponent must lie in (0, 2 ^ d)");
  return InitialCondition(InitialVariant::PowerLaw, ell);
}

InitialCondition InitialCondition::exponential(double ell) {
  if (!std::isfinite(ell)) throw DomainError("exponential rate must be finite");
  return InitialCondition(InitialVariant::Exponential, ell);
}

InitialCondition InitialCondition::custom(std::function<double(double)> density, std::string label) {
  if (!density) throw DomainError("custom initial data needs a density");
  InitialCondition ic(InitialVariant::Custom, 0.0);
  ic.custom_ = std::make_shared<const std::function<double(double)>>(std::move(density));
  ic.label_ = std::move(label);
  return ic;
}

InitialCondition InitialCondition::make(InitialVariant v, double param) {
  switch (v) {
    case InitialVariant::Constant: return constant(param);
    case InitialVariant::Dirac: return dirac(param);
    case InitialVariant::PowerLaw: return power_law(param);
    case InitialVariant::Exponential: return exponential(param);
    case InitialVariant::Custom: break;
  }
  throw SpecError("custom initial data cannot be built from a parameter");
}

bool InitialCondition::bounded() const {
  return variant_ == InitialVariant::Constant ||
         (variant_ == InitialVariant::Exponential && param_ <= 0.0);
}

bool InitialCondition::nonnegative() const {
  switch (variant_) {
    case InitialVariant::Constant:
    case InitialVariant::Dirac: return param_ >= 0.0;
    case InitialVariant::PowerLaw:
    case InitialVariant::Exponential: return true;
    case InitialVariant::Custom: return false;
  }
  return false;
}

double InitialCondition::sup_abs() const {
  if (variant_ == InitialVariant::Constant) return std::abs(param_);
  if (variant_ == InitialVariant::Exponential && param_ <= 0.0) return 1.0;
  return std::numeric_limits<double>::infinity();
}

double InitialCondition::density(double x) const {
  switch (variant_) {
    case InitialVariant::Constant: return param_;
    case InitialVariant::Dirac: break;
    case InitialVariant::PowerLaw: return std::pow(std::abs(x), -param_);
    case InitialVariant::Exponential: return std::exp(param_ * std::abs(x));
    case InitialVariant::Custom: return checked((*custom_)(x), "custom initial density");
  }
  throw UnsupportedError("dirac initial data has no density");
}

double InitialCondition::cell_average(double x, double h) const {
  const double a = x - 0.5 * h, b = x + 0.5 * h;
  switch (variant_) {
    case InitialVariant::Dirac: return (a <= 0.0 && 0.0 < b) ? param_ / h : 0.0;
    case InitialVariant::PowerLaw: {
      if (param_ >= 1.0) throw UnsupportedError("power-law data with ell >= 1 is not locally integrable in d = 1");
      auto G = [&](double y) {
        return std::copysign(std::pow(std::abs(y), 1.0 - param_), y) / (1.0 - param_);
      };
      return (G(b) - G(a)) / h;
    }
    default: return density(x);
  }
}

std::string InitialCondition::describe() const {
  std::ostringstream os;
  switch (variant_) {
    case InitialVariant::Constant: os << "constant(c=" << param_ << ")"; break;
    case InitialVariant::Dirac: os << "dirac(mass=" << param_ << ")"; break;
    case InitialVariant::PowerLaw: os << "power-law(ell=" << param_ << ")"; break;
    case InitialVariant::Exponential: os << "exponential(ell=" << param_ << ")"; break;
    case InitialVariant::Custom: os << label_; break;
  }
  return os.str();
}

namespace {

double J_impl(const InitialCondition& mu, double t, const std::vector<double>& x, bool absolute) {
  if (!(t > 0.0)) throw DomainError("J0 needs t > 0");
  if (x.empty()) throw DomainError("J0 needs a point with at least one coordinate");
  const int d = static_cast<int>(x.size());
  const double r = norm(x);
  const double c = mu.param();
  switch (mu.variant()) {
    case InitialVariant::Constant: return absolute ? std::abs(c) : c;
    case InitialVariant::Dirac: return (absolute ? std::abs(c) : c) * heat_kernel(t, r, d);
    case InitialVariant::PowerLaw:
      if (!(c < d)) throw PreconditionError("rough-initial-data", "power-law exponent must be < d");
      if (r * r / t <= 1e6) return power_law_series(c, t, r, d);
      return gaussian_radial_expectation([c](double y) { return std::pow(y, -c); }, r, t, d);
    case InitialVariant::Exponential:
      if (d == 1) {
        const double st = std::sqrt(t);
        const double xs = x[0];
        return std::exp(0.5 * c * c * t) *
               (std::exp(c * xs) * Phi((xs + c * t) / st) + std::exp(-c * xs) * Phi((c * t - xs) / st));
      }
      return gaussian_radial_expectation([c](double y) { return std::exp(c * y); }, r, t, d);
    case InitialVariant::Custom: {
      if (d != 1) throw UnsupportedError("custom initial densities are supported for d = 1 only");
      const double st = std::sqrt(t);
      const double xs = x[0];
      const double v = half_line([&](double z) {
        double a = mu.density(xs + st * z), b = mu.density(xs - st * z);
        if (absolute) {
          a = std::abs(a);
          b = std::abs(b);
        }
        return (a + b) * std::exp(-0.5 * z * z) / std::sqrt(2.0 * pi);
      });
      return checked(v, "custom initial data integral");
    }
  }
  return 0.0;
}

}  // namespace

double J0(const InitialCondition& mu, double t, const std::vector<double>& x) { return J_impl(mu, t, x, false); }
double J0(const InitialCondition& mu, double t, double x) { return J_impl(mu, t, {x}, false); }
double J_plus(const InitialCondition& mu, double t, const std::vector<double>& x) { return J_impl(mu, t, x, true); }
double J_plus(const InitialCondition& mu, double t, double x) { return J_impl(mu, t, {x}, true); }

}  // namespace subspde
