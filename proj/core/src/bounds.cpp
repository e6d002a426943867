#include "subspde/bounds.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "subspde/errors.hpp"

namespace subspde {

namespace bmq = boost::math::quadrature;
using std::numbers::pi;

namespace {

constexpr double kE = std::numbers::e;

double norm(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

template <class G>
double finite(G g, double a, double b, double tol = 1e-9) {
  static thread_local bmq::tanh_sinh<double> ts;
  return ts.integrate(g, a, b, tol);
}

void require_dalang(const CorrelationKernel& k) {
  const auto dr = dalang_check(k);
  if (!dr.ok) throw PreconditionError("dalang", dr.reason + " (" + k.describe() + ")");
}

void require_p_t(double t, double p) {
  if (!(t > 0.0)) throw DomainError("moment bounds need t > 0");
  if (!(p >= 2.0)) throw DomainError("moment bounds need p >= 2");
}

bool vanishes_beyond_M0(const DiffusionCoefficient& rho) {
  const double M0 = rho.thresholds().M0;
  for (double x : {1e2, 1e4, 1e6, 1e9, 1e12}) {
    const double u = std::max(M0, 1.0) * x;
    if (rho(u) != 0.0 || rho(-u) != 0.0) return false;
  }
  return true;
}

void finish(BoundReport& r) {
  r.total = r.term_J0sq + r.term_J1_over_h + r.term_KM + r.term_Finv;
}

}  // namespace

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Auto: return "auto";
    case Regime::General: return "general";
    case Regime::Concave: return "concave";
    case Regime::Asymptotic: return "asymptotic";
    case Regime::BoundedInitial: return "bounded-initial";
    case Regime::BoundedCoefficient: return "bounded-coefficient";
  }
  return "unknown";
}

Regime regime_from_string(const std::string& s) {
  if (s == "auto") return Regime::Auto;
  if (s == "general") return Regime::General;
  if (s == "concave") return Regime::Concave;
  if (s == "asymptotic") return Regime::Asymptotic;
  if (s == "bounded-initial") return Regime::BoundedInitial;
  if (s == "bounded-coefficient") return Regime::BoundedCoefficient;
  throw SpecError("unknown regime '" + s + "'");
}

std::string to_string(EquationKind e) {
  switch (e) {
    case EquationKind::Heat: return "heat";
    case EquationKind::Wave: return "wave";
    case EquationKind::Fractional: return "fractional";
  }
  return "unknown";
}

EquationKind equation_from_string(const std::string& s) {
  if (s == "heat") return EquationKind::Heat;
  if (s == "wave") return EquationKind::Wave;
  if (s == "fractional") return EquationKind::Fractional;
  throw SpecError("unknown equation '" + s + "'");
}

double J1(const InitialCondition& mu, const CorrelationKernel& k, double t, const std::vector<double>& x) {
  if (!(t > 0.0)) throw DomainError("J1 needs t > 0");
  const int d = static_cast<int>(x.size());
  if (d != k.dim()) throw DomainError("point and kernel dimensions differ");
  require_dalang(k);
  if (d == 1) {
    const double jp = J_plus(mu, 0.5 * t, x);
    return std::pow(2.0, 1.5) * pi * h_heat(k, t) * jp * jp;
  }
  if (mu.variant() == InitialVariant::Dirac)
    throw PreconditionError("rough-initial-data",
                            "dirac initial data makes J1 infinite in d >= 2");
  if (mu.variant() == InitialVariant::Constant) {
    // int_0^t k(r) dr = 2 h(t/2)
    return mu.param() * mu.param() * 2.0 * h_heat(k, 0.5 * t);
  }
  if (mu.variant() == InitialVariant::Custom)
    throw UnsupportedError("custom initial densities are supported for d = 1 only");
  const double r = norm(x);
  const double v = finite(
      [&](double s) {
        if (s <= 0.0 || s >= t) return 0.0;
        const double inner = gaussian_radial_expectation(
            [&](double y) {
              std::vector<double> pt(static_cast<std::size_t>(d), 0.0);
              pt[0] = y;
              const double j = J0(mu, s, pt);
              return j * j;
            },
            r, t - s, d);
        return k_eval(k, t - s) * inner;
      },
      0.0, t, 1e-7);
  if (!std::isfinite(v))
    throw PreconditionError("rough-initial-data", "J1 quadrature did not converge");
  return v;
}

BoundReport moment_bound_heat(const DiffusionCoefficient& rho, const CorrelationKernel& k,
                              const InitialCondition& mu, double t, const std::vector<double>& x,
                              double p, Regime regime, const BoundConstants& c) {
  require_p_t(t, p);
  const int d = static_cast<int>(x.size());
  if (d != k.dim()) throw DomainError("point and kernel dimensions differ");
  require_dalang(k);
  if (d >= 2 && mu.variant() == InitialVariant::Dirac)
    throw PreconditionError("rough-initial-data", "dirac initial data is excluded for d >= 2");

  const Thresholds& th = rho.thresholds();
  if (regime == Regime::Auto) regime = th.M0 == 0.0 ? Regime::Concave : Regime::General;
  if (regime == Regime::Concave && th.M0 != 0.0)
    throw PreconditionError("rho-concave", "the concave regime needs |rho| concave on each half-line (M0 = 0)");

  BoundReport r;
  r.equation = EquationKind::Heat;
  r.regime = regime;
  r.t = t;
  r.x = x.front();
  r.p = p;
  r.h = h_heat(k, t);
  const Envelope env(rho);
  const double h = r.h;

  auto j1_over_h = [&]() {
    if (d == 1) {
      const double jp = J_plus(mu, 0.5 * t, x);
      return std::pow(2.0, 1.5) * pi * jp * jp;
    }
    return J1(mu, k, t, x) / h;
  };
  auto j0sq = [&]() {
    const double j = J0(mu, t, x);
    return 2.0 * j * j;
  };

  switch (regime) {
    case Regime::General:
    case Regime::Concave: {
      const double pre = 2.0 * std::pow(2.0 * pi, d);
      r.term_J0sq = j0sq();
      r.term_J1_over_h = pre * j1_over_h();
      r.term_KM = regime == Regime::General ? pre * 4.0 * th.K_M * th.K_M * p * h : 0.0;
      r.term_Finv = pre * env.F_inverse(2.0 * p * h);
      break;
    }
    case Regime::Asymptotic:
      if (t < 1.0) throw DomainError("the asymptotic regime needs t >= 1");
      if (vanishes_beyond_M0(rho))
        throw PreconditionError("rho-nonvanishing", "rho vanishes beyond M0; use the general regime");
      r.term_J0sq = j0sq();
      r.term_J1_over_h = c.C * j1_over_h();
      r.term_Finv = c.C * env.F_inverse(c.C * p * h);
      break;
    case Regime::BoundedInitial:
      if (t < 1.0) throw DomainError("the bounded-initial regime needs t >= 1");
      if (!mu.bounded())
        throw PreconditionError("bounded-initial-data", mu.describe() + " is not bounded");
      r.term_Finv = c.C_star * env.F_inverse(c.C_star * p * h);
      break;
    case Regime::BoundedCoefficient: {
      const auto sup = rho.sup_abs();
      if (!sup) throw PreconditionError("rho-bounded", rho.describe() + " is not bounded");
      r.term_J0sq = j0sq();
      r.term_KM = 8.0 * p * (*sup) * (*sup) * h;
      break;
    }
    case Regime::Auto: break;
  }
  finish(r);
  return r;
}

namespace {

// 1/2 int_{x-t}^{x+t} g(y) dy with a break at the origin when it is inside
template <class G>
double half_window(G g, double x, double t) {
  const double a = x - t, b = x + t;
  if (a < 0.0 && b > 0.0) return 0.5 * (finite(g, a, 0.0) + finite(g, 0.0, b));
  return 0.5 * finite(g, a, b);
}

double window_mass(const InitialCondition& mu, double t, double x, bool absolute) {
  const double c = mu.param();
  switch (mu.variant()) {
    case InitialVariant::Constant: return (absolute ? std::abs(c) : c) * t;
    case InitialVariant::Dirac: return std::abs(x) <= t ? 0.5 * (absolute ? std::abs(c) : c) : 0.0;
    default: break;
  }
  return half_window(
      [&](double y) {
        const double v = mu.density(y);
        return absolute ? std::abs(v) : v;
      },
      x, t);
}

}  // namespace

double J0_wave(const InitialCondition& mu0, const InitialCondition& mu1, double t, double x) {
  if (!(t > 0.0)) throw DomainError("wave J0 needs t > 0");
  if (mu0.variant() == InitialVariant::Dirac)
    throw PreconditionError("wave-initial-data", "mu0 must be a locally square integrable density");
  return 0.5 * (mu0.density(x + t) + mu0.density(x - t)) + window_mass(mu1, t, x, false);
}

double J1_wave_bound(const InitialCondition& mu0, const InitialCondition& mu1, const CorrelationKernel& k,
                     double t, double x) {
  if (!(t > 0.0)) throw DomainError("wave J1 needs t > 0");
  if (mu0.variant() == InitialVariant::Dirac)
    throw PreconditionError("wave-initial-data", "mu0 must be a locally square integrable density");
  if (mu0.variant() == InitialVariant::PowerLaw && mu0.param() >= 0.5)
    throw PreconditionError("wave-initial-data", "power-law mu0 needs ell < 1/2 to be locally square integrable");
  double g_mu0_sq;
  if (mu0.variant() == InitialVariant::Constant) {
    g_mu0_sq = mu0.param() * mu0.param() * t;
  } else {
    g_mu0_sq = half_window([&](double y) { const double v = mu0.density(y); return v * v; }, x, t);
  }
  const double g_mu1 = window_mass(mu1, t, x, true);
  return 4.0 * t * k_wave(k, 2.0 * t) * (t * g_mu0_sq + 2.0 * (t * g_mu1) * (t * g_mu1));
}

BoundReport moment_bound_wave(const DiffusionCoefficient& rho, const CorrelationKernel& k,
                              const InitialCondition& mu0, const InitialCondition& mu1, double t,
                              double x, double p, const BoundConstants& c) {
  require_p_t(t, p);
  if (k.dim() != 1) throw UnsupportedError("the wave bound is implemented for d = 1 only");
  require_dalang(k);
  const Thresholds& th = rho.thresholds();
  BoundReport r;
  r.equation = EquationKind::Wave;
  r.regime = th.M0 == 0.0 ? Regime::Concave : Regime::General;
  r.t = t;
  r.x = x;
  r.p = p;
  r.h = h_wave(k, t);
  const Envelope env(rho);
  const double K2 = c.K2.value_or(4.0 * th.K_M * th.K_M);
  const double j0 = J0_wave(mu0, mu1, t, x);
  r.term_J0sq = 2.0 * j0 * j0;
  r.term_J1_over_h = c.K1 * J1_wave_bound(mu0, mu1, k, t, x) / r.h;
  r.term_KM = c.K1 * K2 * p * r.h;
  r.term_Finv = c.K1 * env.F_inverse(2.0 * p * r.h);
  finish(r);
  return r;
}

void check_fractional_params(const FractionalParams& fp) {
  if (!(fp.a > 0.0 && fp.a <= 2.0)) throw DomainError("fractional equation needs a in (0, 2]");
  if (!(fp.b > 0.0 && fp.b < 2.0)) throw DomainError("fractional equation needs b in (0, 2)");
  if (!(fp.gamma >= 0.0)) throw DomainError("fractional equation needs gamma >= 0");
  if (fp.d < 1) throw DomainError("fractional equation needs d >= 1");
  const double d = fp.d;
  if (!(fp.b + fp.gamma > 0.5 * (1.0 + d * fp.b / fp.a))) {
    std::ostringstream os;
    os << "b + gamma > (1 + d b / a) / 2 fails: " << fp.b + fp.gamma << " <= "
       << 0.5 * (1.0 + d * fp.b / fp.a);
    throw PreconditionError("fractional-dalang", os.str());
  }
  if (!(2.0 * fp.a > d)) throw PreconditionError("fractional-dalang", "2a > d fails");
  if (!(fp.gamma == 0.0 || (fp.a > d && fp.d == 1)))
    throw PreconditionError("fractional-kernel", "gamma = 0 or a > d = 1 is required");
}

BoundReport moment_bound_fractional(const DiffusionCoefficient& rho, const FractionalParams& fp,
                                    const InitialCondition& mu, double t, const std::vector<double>& x,
                                    double p, Regime regime, const BoundConstants& c) {
  require_p_t(t, p);
  check_fractional_params(fp);
  if (static_cast<int>(x.size()) != fp.d) throw DomainError("point and equation dimensions differ");
  if (mu.variant() != InitialVariant::Constant)
    throw UnsupportedError("the fractional bound is implemented for constant initial data");
  const double sigma = fp.sigma();
  const Thresholds& th = rho.thresholds();
  if (regime == Regime::Auto) regime = th.M0 == 0.0 ? Regime::Concave : Regime::General;

  BoundReport r;
  r.equation = EquationKind::Fractional;
  r.regime = regime;
  r.t = t;
  r.x = x.front();
  r.p = p;
  r.sigma = sigma;
  r.h = std::pow(t, 1.0 - sigma);
  const Envelope env(rho);
  const double cc = mu.param();
  const double j1 = cc * cc * c.C0 * r.h / (1.0 - sigma);
  switch (regime) {
    case Regime::General:
    case Regime::Concave:
      r.term_J0sq = 2.0 * cc * cc;
      r.term_J1_over_h = c.K * j1 / r.h;
      r.term_KM = regime == Regime::General ? c.K * c.K * p * r.h : 0.0;
      r.term_Finv = c.K * env.F_inverse(c.K * p * r.h);
      break;
    case Regime::BoundedInitial:
      if (t < 1.0) throw DomainError("the bounded-initial regime needs t >= 1");
      r.term_Finv = c.C_star * env.F_inverse(c.C_star * p * r.h);
      break;
    default:
      throw UnsupportedError("regime " + to_string(regime) + " is not defined for the fractional equation");
  }
  finish(r);
  return r;
}

double noise_functional(EquationKind eq, const CorrelationKernel& k, double t, const FractionalParams& fp) {
  switch (eq) {
    case EquationKind::Heat: return h_heat(k, t);
    case EquationKind::Wave: return h_wave(k, t);
    case EquationKind::Fractional:
      check_fractional_params(fp);
      return std::pow(t, 1.0 - fp.sigma());
  }
  return 0.0;
}

TailBound tail_bound(const DiffusionCoefficient& rho, const CorrelationKernel& k, double t, double z,
                     EquationKind eq, const BoundConstants& c, const FractionalParams& fp) {
  if (!(z > 0.0)) throw DomainError("tail bound needs z > 0");
  if (!(t >= 1.0)) throw DomainError("tail bound needs t >= 1");
  const double M = rho.thresholds().M;
  const Envelope env(rho);
  TailBound tb;
  tb.h = noise_functional(eq, k, t, fp);
  const double cs = c.C_star;
  tb.L_t = kE * std::sqrt(2.0 * cs * M * M + cs * env.F_inverse(2.0 * cs * tb.h));
  if (z < tb.L_t) {
    tb.bound = 1.0;
    return tb;
  }
  const double Fz = env.F(z * z / (cs * kE * kE));
  tb.bound = std::min(1.0, std::exp(-Fz / (cs * tb.h)));
  return tb;
}

LegendreResult legendre_tail(const std::function<double(double)>& moment_log, double z, double p_max) {
  if (!(z > 0.0)) throw DomainError("legendre tail needs z > 0");
  if (!(p_max > 2.0)) throw DomainError("legendre tail needs p_max > 2");
  const double lz = std::log(z);
  auto phi = [&](double v) {
    const double p = std::exp(v);
    const double a = moment_log(p);
    if (!std::isfinite(a)) {
      std::ostringstream os;
      os << "moment exponent is not finite at p=" << p;
      throw EvaluationError(os.str());
    }
    return p * lz - a;
  };
  const double v0 = std::log(2.0), v1 = std::log(p_max);
  constexpr int kScan = 64;
  std::vector<double> vs(kScan + 1), fs(kScan + 1);
  int best = 0;
  for (int i = 0; i <= kScan; ++i) {
    vs[i] = i == kScan ? v1 : v0 + (v1 - v0) * i / kScan;
    fs[i] = phi(vs[i]);
    if (fs[i] > fs[best]) best = i;
  }
  double lo = vs[std::max(best - 1, 0)], hi = vs[std::min(best + 1, kScan)];
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c1 = hi - g * (hi - lo), c2 = lo + g * (hi - lo);
  double f1 = phi(c1), f2 = phi(c2);
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++it) {
    if (f1 < f2) {
      lo = c1;
      c1 = c2;
      f1 = f2;
      c2 = lo + g * (hi - lo);
      f2 = phi(c2);
    } else {
      hi = c2;
      c2 = c1;
      f2 = f1;
      c1 = hi - g * (hi - lo);
      f1 = phi(c1);
    }
  }
  LegendreResult res;
  double v_star = vs[best], f_star = fs[best];
  if (f1 > f_star) { v_star = c1; f_star = f1; }
  if (f2 > f_star) { v_star = c2; f_star = f2; }
  res.p_star = std::exp(v_star);
  res.exponent = f_star;
  res.bound = std::min(1.0, std::exp(-f_star));
  return res;
}

double spatial_asymptote(const DiffusionCoefficient& rho, const CorrelationKernel& k, double t, double R,
                         EquationKind eq, double C, const FractionalParams& fp) {
  if (!(t > 1.0)) throw DomainError("spatial asymptote needs t > 1");
  if (!(R > 1.0)) throw DomainError("spatial asymptote needs R > 1");
  if (!(C > 0.0)) throw DomainError("spatial asymptote needs C > 0");
  if (eq != EquationKind::Fractional) {
    const auto dr = dalang_check(k);
    if (!dr.ok || !dr.improved_eta || !(*dr.improved_eta > 0.0))
      throw PreconditionError("improved-dalang", "no positive eta for " + k.describe());
  }
  const Envelope env(rho);
  const double h = noise_functional(eq, k, t, fp);
  return std::sqrt(env.F_inverse(C * h * std::log(R)));
}

}  // namespace subspde
