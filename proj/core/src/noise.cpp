#include "subspde/noise.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "subspde/errors.hpp"

namespace subspde {

namespace bmq = boost::math::quadrature;
using std::numbers::pi;

namespace {

constexpr double kQuadTol = 1e-12;

// surface area of the unit sphere in R^d
double sphere_area(int d) { return 2.0 * std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d); }

// density of |Z| for a standard Gaussian Z in R^d
double chi_density(double rho, int d) {
  const double log_c = (1.0 - 0.5 * d) * std::log(2.0) - std::lgamma(0.5 * d);
  return std::exp(log_c + (d - 1) * std::log(rho) - 0.5 * rho * rho);
}

// (1 - exp(-x)) / x, stable near 0
double one_minus_exp_over(double x) {
  if (x < 1e-8) return 1.0 - 0.5 * x;
  return -std::expm1(-x) / x;
}

// (w - sin w) / w^3
double wave_weight(double w) {
  if (w < 0.1) {
    const double w2 = w * w;
    return 1.0 / 6.0 - w2 / 120.0 + w2 * w2 / 5040.0 - w2 * w2 * w2 / 362880.0;
  }
  return (w - std::sin(w)) / (w * w * w);
}

// int_0^inf g over (0, inf), endpoint singularities allowed
template <class G>
double half_line(G g) {
  static thread_local bmq::exp_sinh<double> es;
  return es.integrate(g, kQuadTol);
}

template <class G>
double finite(G g, double a, double b) {
  static thread_local bmq::tanh_sinh<double> ts;
  return ts.integrate(g, a, b, kQuadTol);
}

}  // namespace

std::string to_string(KernelVariant v) {
  switch (v) {
    case KernelVariant::SpaceTimeWhite: return "white";
    case KernelVariant::Constant: return "constant";
    case KernelVariant::Riesz: return "riesz";
    case KernelVariant::OrnsteinUhlenbeck: return "ou";
    case KernelVariant::BesselPotential: return "bessel-potential";
    case KernelVariant::BesselSpectral: return "bessel-spectral";
  }
  return "unknown";
}

KernelVariant kernel_variant_from_string(const std::string& s) {
  if (s == "white" || s == "SpaceTimeWhite") return KernelVariant::SpaceTimeWhite;
  if (s == "constant" || s == "Constant") return KernelVariant::Constant;
  if (s == "riesz" || s == "Riesz") return KernelVariant::Riesz;
  if (s == "ou" || s == "OrnsteinUhlenbeck") return KernelVariant::OrnsteinUhlenbeck;
  if (s == "bessel-potential" || s == "BesselPotential") return KernelVariant::BesselPotential;
  if (s == "bessel-spectral" || s == "BesselSpectral") return KernelVariant::BesselSpectral;
  throw SpecError("unknown kernel variant '" + s + "'");
}

CorrelationKernel CorrelationKernel::make(KernelVariant v, double param, int d) {
  if (d < 1) throw DomainError("kernel dimension must be >= 1");
  switch (v) {
    case KernelVariant::SpaceTimeWhite:
    case KernelVariant::Constant:
      param = 0.0;
      break;
    case KernelVariant::Riesz:
      if (!(param > 0.0)) throw DomainError("riesz kernel needs alpha > 0");
      break;
    case KernelVariant::OrnsteinUhlenbeck:
      if (!(param > 0.0 && param <= 2.0))
        throw DomainError("ou kernel exp(-|x|^alpha) is positive definite only for alpha in (0,2]");
      break;
    case KernelVariant::BesselPotential:
    case KernelVariant::BesselSpectral:
      if (!(param > 0.0)) throw DomainError("bessel kernels need nu > 0");
      break;
  }
  return CorrelationKernel(v, param, d);
}

CorrelationKernel CorrelationKernel::white(int d) { return make(KernelVariant::SpaceTimeWhite, 0, d); }
CorrelationKernel CorrelationKernel::constant(int d) { return make(KernelVariant::Constant, 0, d); }
CorrelationKernel CorrelationKernel::riesz(double a, int d) { return make(KernelVariant::Riesz, a, d); }
CorrelationKernel CorrelationKernel::ornstein_uhlenbeck(double a, int d) {
  return make(KernelVariant::OrnsteinUhlenbeck, a, d);
}
CorrelationKernel CorrelationKernel::bessel_potential(double nu, int d) {
  return make(KernelVariant::BesselPotential, nu, d);
}
CorrelationKernel CorrelationKernel::bessel_spectral(double nu, int d) {
  return make(KernelVariant::BesselSpectral, nu, d);
}

bool CorrelationKernel::has_spatial_form() const {
  return variant_ != KernelVariant::SpaceTimeWhite && variant_ != KernelVariant::BesselPotential;
}

double CorrelationKernel::f(double r) const {
  switch (variant_) {
    case KernelVariant::Constant: return 1.0;
    case KernelVariant::Riesz: return std::pow(r, -param_);
    case KernelVariant::OrnsteinUhlenbeck: return std::exp(-std::pow(r, param_));
    case KernelVariant::BesselSpectral: return std::pow(1.0 + r * r, -0.5 * param_);
    default: break;
  }
  throw UnsupportedError(describe() + " has no pointwise spatial form");
}

double CorrelationKernel::spectral_density(double r) const {
  const double norm = std::pow(2.0 * pi, -static_cast<double>(d_));
  switch (variant_) {
    case KernelVariant::SpaceTimeWhite: return norm;
    case KernelVariant::BesselPotential: return norm * std::pow(1.0 + r * r, -0.5 * param_);
    default: break;
  }
  throw UnsupportedError(describe() + " is evaluated in physical space");
}

std::string CorrelationKernel::describe() const {
  std::ostringstream os;
  os << to_string(variant_);
  if (variant_ == KernelVariant::Riesz || variant_ == KernelVariant::OrnsteinUhlenbeck)
    os << "(alpha=" << param_ << ")";
  else if (variant_ == KernelVariant::BesselPotential || variant_ == KernelVariant::BesselSpectral)
    os << "(nu=" << param_ << ")";
  os << " d=" << d_;
  return os.str();
}

DalangResult dalang_check(const CorrelationKernel& k) {
  DalangResult r;
  const int d = k.dim();
  const double a = k.param();
  switch (k.variant()) {
    case KernelVariant::SpaceTimeWhite:
      r.ok = d == 1;
      if (r.ok) r.improved_eta = 0.5;
      else r.reason = "space-time white noise needs d = 1";
      break;
    case KernelVariant::Constant:
      r.ok = true;
      r.improved_eta = 1.0;
      break;
    case KernelVariant::Riesz:
      r.ok = a > 0.0 && a < std::min(2.0, static_cast<double>(d));
      if (r.ok) r.improved_eta = 1.0 - 0.5 * a;
      else r.reason = "riesz kernel needs 0 < alpha < min(2, d)";
      break;
    case KernelVariant::OrnsteinUhlenbeck:
    case KernelVariant::BesselSpectral:
      // bounded continuous f: the condition holds with room to spare
      r.ok = true;
      r.improved_eta = 1.0;
      break;
    case KernelVariant::BesselPotential:
      r.ok = a + 2.0 > d;
      if (r.ok) r.improved_eta = std::min(1.0, 1.0 + 0.5 * (a - d));
      else r.reason = "bessel potential needs nu + 2 > d";
      break;
  }
  return r;
}

double heat_kernel(double t, double r, int d) {
  if (!(t > 0.0)) throw DomainError("heat kernel needs t > 0");
  return std::pow(2.0 * pi * t, -0.5 * d) * std::exp(-r * r / (2.0 * t));
}

namespace {

void require_dalang(const CorrelationKernel& k) {
  const auto dr = dalang_check(k);
  if (!dr.ok) throw PreconditionError("dalang", dr.reason + " (" + k.describe() + ")");
}

// int p_s(z) f(z) dz for kernels with a spatial form
double spatial_k(const CorrelationKernel& k, double s) {
  const int d = k.dim();
  const double rs = std::sqrt(s);
  return half_line([&](double rho) {
    // the singularity of f at 0 is integrable; samples that overflow there are dropped
    const double v = k.f(rs * rho) * chi_density(rho, d);
    return std::isfinite(v) ? v : 0.0;
  });
}

double spectral_k(const CorrelationKernel& k, double s) {
  const int d = k.dim();
  const double w = sphere_area(d);
  return w * half_line([&](double r) {
           return k.spectral_density(r) * std::exp(-0.5 * s * r * r) * std::pow(r, d - 1);
         });
}

}  // namespace

std::optional<double> h_heat_closed(const CorrelationKernel& k, double t) {
  const int d = k.dim();
  const double a = k.param();
  switch (k.variant()) {
    case KernelVariant::SpaceTimeWhite:
      if (d == 1) return std::sqrt(t / pi);
      break;
    case KernelVariant::Constant:
      return t;
    case KernelVariant::Riesz: {
      const double c = std::pow(2.0, 1.0 - a) * std::tgamma(0.5 * (d - a)) /
                       ((2.0 - a) * std::tgamma(0.5 * d));
      return c * std::pow(t, 1.0 - 0.5 * a);
    }
    case KernelVariant::OrnsteinUhlenbeck:
      if (a != 2.0) break;
      if (d == 1) return 0.5 * (std::sqrt(1.0 + 4.0 * t) - 1.0);
      if (d == 2) return 0.25 * std::log1p(4.0 * t);
      return 0.5 * (1.0 - std::pow(1.0 + 4.0 * t, 1.0 - 0.5 * d)) / (d - 2.0);
    default:
      break;
  }
  return std::nullopt;
}

double h_heat_quadrature(const CorrelationKernel& k, double t) {
  require_dalang(k);
  if (!(t >= 0.0)) throw DomainError("h(t) needs t >= 0");
  if (t == 0.0) return 0.0;
  const int d = k.dim();
  if (!k.has_spatial_form()) {
    // 1/2 int_0^{2t} e^{-s r^2/2} ds = (1 - e^{-t r^2}) / r^2
    return sphere_area(d) * half_line([&](double r) {
             return k.spectral_density(r) * t * one_minus_exp_over(t * r * r) * std::pow(r, d - 1);
           });
  }
  if (k.variant() == KernelVariant::Constant) return t;
  // 1/2 int_0^{2t} k(s) ds with s = 2t e^{-v}
  const double two_t = 2.0 * t;
  return 0.5 * half_line([&](double v) {
           const double s = two_t * std::exp(-v);
           return s == 0.0 ? 0.0 : spatial_k(k, s) * s;
         });
}

double h_heat(const CorrelationKernel& k, double t) {
  require_dalang(k);
  if (!(t >= 0.0)) throw DomainError("h(t) needs t >= 0");
  if (auto c = h_heat_closed(k, t)) return *c;
  return h_heat_quadrature(k, t);
}

std::optional<double> k_closed(const CorrelationKernel& k, double t) {
  const int d = k.dim();
  const double a = k.param();
  switch (k.variant()) {
    case KernelVariant::SpaceTimeWhite:
      if (d == 1) return 1.0 / std::sqrt(2.0 * pi * t);
      break;
    case KernelVariant::Constant:
      return 1.0;
    case KernelVariant::Riesz:
      return std::pow(2.0, -0.5 * a) * std::tgamma(0.5 * (d - a)) / std::tgamma(0.5 * d) *
             std::pow(t, -0.5 * a);
    case KernelVariant::OrnsteinUhlenbeck:
      if (a == 2.0) return std::pow(1.0 + 2.0 * t, -0.5 * d);
      break;
    default:
      break;
  }
  return std::nullopt;
}

double k_quadrature(const CorrelationKernel& k, double t) {
  require_dalang(k);
  if (!(t > 0.0)) throw DomainError("k(t) needs t > 0");
  if (k.variant() == KernelVariant::Constant) return 1.0;
  return k.has_spatial_form() ? spatial_k(k, t) : spectral_k(k, t);
}

double k_eval(const CorrelationKernel& k, double t) {
  require_dalang(k);
  if (!(t > 0.0)) throw DomainError("k(t) needs t > 0");
  if (auto c = k_closed(k, t)) return *c;
  return k_quadrature(k, t);
}

namespace {

void require_wave(const CorrelationKernel& k) {
  if (k.dim() != 1) throw UnsupportedError("wave functionals are implemented for d = 1 only");
  require_dalang(k);
}

}  // namespace

std::optional<double> h_wave_closed(const CorrelationKernel& k, double t) {
  const double a = k.param();
  switch (k.variant()) {
    case KernelVariant::SpaceTimeWhite: return 0.25 * t * t;
    case KernelVariant::Constant: return t * t * t / 3.0;
    case KernelVariant::Riesz:
      return std::pow(2.0, 1.0 - a) * std::pow(t, 3.0 - a) / ((1.0 - a) * (2.0 - a) * (3.0 - a));
    default: break;
  }
  return std::nullopt;
}

double h_wave_quadrature(const CorrelationKernel& k, double t) {
  require_wave(k);
  if (!(t >= 0.0)) throw DomainError("h(t) needs t >= 0");
  if (t == 0.0) return 0.0;
  if (k.has_spatial_form()) {
    return 0.5 * finite(
                     [&](double u) {
                       const double w = t - 0.5 * u;
                       return k.f(u) * w * w;
                     },
                     0.0, 2.0 * t);
  }
  // (t^2/pi) int_0^inf fhat(w / 2t) (w - sin w) / w^3 dw, fhat = 2 pi * density
  auto fhat = [&](double w) { return 2.0 * pi * k.spectral_density(w / (2.0 * t)); };
  constexpr int kPieces = 64;
  const double W = 2.0 * pi * kPieces;
  double body = 0.0;
  for (int j = 0; j < kPieces; ++j) {
    const double a = 2.0 * pi * j, b = a + 2.0 * pi;
    body += bmq::gauss_kronrod<double, 61>::integrate(
        [&](double w) { return fhat(w) * wave_weight(w); }, a, b, 8, 1e-13);
  }
  // tail: int_W^inf fhat/w^2 - int_W^inf fhat sin(w)/w^3, with sin(W + v) = sin v
  const double smooth =
      half_line([&](double v) { const double w = W + v; return fhat(w) / (w * w); });
  static thread_local bmq::ooura_fourier_sin<double> osin;
  const double osc = osin.integrate([&](double v) { const double w = W + v; return fhat(w) / (w * w * w); },
                                    1.0).first;
  return t * t / pi * (body + smooth - osc);
}

double h_wave(const CorrelationKernel& k, double t) {
  require_wave(k);
  if (!(t >= 0.0)) throw DomainError("h(t) needs t >= 0");
  if (auto c = h_wave_closed(k, t)) return *c;
  return h_wave_quadrature(k, t);
}

double k_wave(const CorrelationKernel& k, double t) {
  require_wave(k);
  if (!(t > 0.0)) throw DomainError("k(t) needs t > 0");
  const double a = k.param();
  switch (k.variant()) {
    case KernelVariant::SpaceTimeWhite: return 0.5;
    case KernelVariant::Constant: return t;
    case KernelVariant::Riesz: return std::pow(t, 1.0 - a) / (1.0 - a);
    case KernelVariant::BesselPotential: {
      // int_0^t f = (1/pi) int_0^inf fhat(xi) sin(t xi) / xi dxi
      static thread_local bmq::ooura_fourier_sin<double> osin;
      return osin.integrate(
                 [&](double xi) { return 2.0 * k.spectral_density(xi) / xi; }, t).first;
    }
    default: break;
  }
  return finite([&](double u) { return k.f(u); }, 0.0, t);
}

double heat_factorization_check(double t, double s, double a, double b) {
  if (!(s > 0.0 && s < t)) throw DomainError("factorization check needs 0 < s < t");
  const double lhs = heat_kernel(t - s, a) * heat_kernel(s, b);
  const double rhs = heat_kernel(s * (t - s) / t, b - s / t * (a + b)) * heat_kernel(t, a + b);
  return std::abs(lhs - rhs);
}

}  // namespace subspde
