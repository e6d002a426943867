#include "subspde/diffusion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "subspde/errors.hpp"

namespace subspde {

namespace {

constexpr double kE = 2.718281828459045235;
constexpr double kGridLo = 1e-6;
constexpr double kGridHi = 1e12;
constexpr std::size_t kGridN = 10000;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// log(e + u^2) without overflowing u^2
inline double log_e_u2(double a) {
  if (a > 1e150) return 2.0 * std::log(a);
  if (a < 1.0) return 1.0 + std::log1p(a * a / kE);
  return std::log(kE + a * a);
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  const double step = std::log(hi / lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo * std::exp(step * static_cast<double>(i));
  g.back() = hi;
  return g;
}

// Index of the last interior grid point where the divided second difference
// is positive beyond roundoff, or -1.
long last_convex_index(const std::vector<double>& x, const std::vector<double>& f) {
  long last = -1;
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    const double h1 = x[i] - x[i - 1];
    const double h2 = x[i + 1] - x[i];
    const double d2 = 2.0 * ((f[i + 1] - f[i]) / h2 - (f[i] - f[i - 1]) / h1) / (h1 + h2);
    const double scale = std::abs(f[i - 1]) + std::abs(f[i]) + std::abs(f[i + 1]);
    const double tol = 64.0 * kEps * scale / (h1 * h2);
    if (!std::isfinite(d2)) continue;
    if (d2 > tol) last = static_cast<long>(i);
  }
  return last;
}

double checked(double v, double u) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "diffusion coefficient is not finite at u=" << u;
    throw EvaluationError(os.str());
  }
  return v;
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::RatioPower: return "ratio-power";
    case Family::LogPerturbed: return "log-perturbed";
    case Family::IteratedLog: return "iterated-log";
    case Family::Custom: return "custom";
  }
  return "unknown";
}

Family family_from_string(const std::string& s) {
  if (s == "ratio-power" || s == "RatioPower") return Family::RatioPower;
  if (s == "log-perturbed" || s == "LogPerturbed") return Family::LogPerturbed;
  if (s == "iterated-log" || s == "IteratedLog" || s == "vsv") return Family::IteratedLog;
  if (s == "custom" || s == "Custom") return Family::Custom;
  throw SpecError("unknown diffusion family '" + s + "'");
}

struct DiffusionCoefficient::Impl {
  Family family = Family::RatioPower;
  CoefficientParams p;
  std::string label;
  std::function<double(double)> custom;
  Thresholds th;
  std::optional<double> sup;
  bool even = true;

  double eval(double u) const {
    const double a = std::abs(u);
    switch (family) {
      case Family::RatioPower:
        if (a == 0.0) return 0.0;
        if (p.r == 0.0) {
          if (p.alpha == 0.5) return std::sqrt(a);
          if (p.alpha == 0.0) return 1.0;
          return std::pow(a, p.alpha);
        }
        if (p.alpha == 0.0) return a / (p.r + a);
        return a / std::pow(p.r + a, 1.0 - p.alpha);
      case Family::LogPerturbed: {
        const double base = p.alpha == 0.0 ? 1.0 : (p.alpha == 1.0 ? a : std::pow(a, p.alpha));
        if (base == 0.0) return 0.0;
        return base * std::pow(log_e_u2(a), -p.beta);
      }
      case Family::IteratedLog:
        if (a == 0.0) return 0.0;
        return a * std::exp(-p.beta * std::pow(std::log(log_e_u2(a)), p.kappa));
      case Family::Custom:
        return checked(custom(u), u);
    }
    return 0.0;
  }
};

DiffusionCoefficient::DiffusionCoefficient(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {}

namespace {

// Narrows the onset of concavity of |rho| from the grid bracket [a, b] by
// bisection on a local second difference. Falls back to b when the bracket
// does not straddle a sign change at this resolution.
double refine_onset(const DiffusionCoefficient::Impl& c, double a, double b) {
  auto convex = [&](double x) {
    const double h = 1e-3 * x;
    for (double s : {1.0, -1.0}) {
      if (s < 0.0 && c.even) break;
      const double f0 = std::abs(c.eval(s * x));
      const double fl = std::abs(c.eval(s * (x - h)));
      const double fr = std::abs(c.eval(s * (x + h)));
      if (fl + fr - 2.0 * f0 > 64.0 * kEps * (fl + fr + f0)) return true;
    }
    return false;
  };
  if (!convex(a) || convex(b)) return b;
  while (b > a * (1.0 + 1e-10)) {
    const double mid = std::sqrt(a * b);
    (convex(mid) ? a : b) = mid;
  }
  return b;
}

Thresholds scan_thresholds(const DiffusionCoefficient::Impl& c, std::optional<double> declared_M0) {
  const auto u = geometric_grid(kGridLo, kGridHi, kGridN);
  std::vector<double> fp(kGridN), fm(kGridN);
  for (std::size_t i = 0; i < kGridN; ++i) {
    fp[i] = std::abs(c.eval(u[i]));
    fm[i] = c.even ? fp[i] : std::abs(c.eval(-u[i]));
  }

  Thresholds th;
  if (declared_M0) {
    th.M0 = *declared_M0;
  } else {
    long i0 = last_convex_index(u, fp);
    if (!c.even) i0 = std::max(i0, last_convex_index(u, fm));
    if (i0 >= static_cast<long>(kGridN) - 3) {
      std::ostringstream os;
      os << "|rho| is still convex near " << u[static_cast<std::size_t>(i0)]
         << "; no onset of concavity below " << kGridHi;
      throw ThresholdError(os.str());
    }
    if (i0 < 0) {
      th.M0 = 0.0;
    } else {
      const auto i = static_cast<std::size_t>(i0);
      th.M0 = refine_onset(c, u[i > 0 ? i - 1 : 0], u[i + 2]);
    }
  }
  if (th.M0 == 0.0) return th;  // M = K_M = 0 is admissible when M0 = 0

  double M = th.M0;
  // |rho(x)|/x must be non-increasing beyond M
  for (std::size_t i = kGridN - 1; i-- > 0;) {
    const double a = fp[i] / u[i], b = fp[i + 1] / u[i + 1];
    const double am = fm[i] / u[i], bm = fm[i + 1] / u[i + 1];
    if (b > a * (1.0 + 1e-12) || bm > am * (1.0 + 1e-12)) {
      M = std::max(M, u[i + 1]);
      break;
    }
  }
  for (double p : {2.0, 3.0, 4.0, 8.0}) {
    std::vector<double> x(kGridN), g(kGridN);
    for (std::size_t i = 0; i < kGridN; ++i) {
      x[i] = std::pow(u[i], p);
      g[i] = std::pow(fp[i], p) + std::pow(fm[i], p);
    }
    const long ip = last_convex_index(x, g);
    if (ip >= 0) M = std::max(M, u[static_cast<std::size_t>(ip) + 1]);
  }
  if (M >= u[kGridN - 3]) {
    std::ostringstream os;
    os << "rho_p concavity onset not found below " << kGridHi;
    throw ThresholdError(os.str());
  }
  th.M = M;

  double km = 0.0;
  const std::size_t nl = 4000;
  for (std::size_t i = 0; i < nl; ++i) {
    const double x = M * static_cast<double>(i) / static_cast<double>(nl);
    km = std::max(km, std::abs(c.eval(x)));
    if (!c.even) km = std::max(km, std::abs(c.eval(-x)));
  }
  for (std::size_t i = 0; i < kGridN && u[i] < M; ++i) km = std::max({km, fp[i], fm[i]});
  th.K_M = km;
  return th;
}

}  // namespace

DiffusionCoefficient DiffusionCoefficient::ratio_power(double alpha, double r) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("ratio-power: alpha must lie in [0,1)");
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("ratio-power: r must be >= 0");
  auto impl = std::make_shared<Impl>();
  impl->family = Family::RatioPower;
  impl->p.alpha = alpha;
  impl->p.r = r;
  impl->label = "ratio-power";
  if (alpha == 0.0) impl->sup = 1.0;
  // concave on [0, inf) for every admissible (alpha, r)
  impl->th = Thresholds{};
  return DiffusionCoefficient(std::move(impl));
}

DiffusionCoefficient DiffusionCoefficient::log_perturbed(double alpha, double beta) {
  if (!std::isfinite(beta)) throw DomainError("log-perturbed: beta must be finite");
  const bool case_i = alpha == 0.0 && beta < 0.0;
  const bool case_ii = alpha > 0.0 && alpha < 1.0;
  const bool case_iii = alpha == 1.0 && beta > 0.0;
  if (!(case_i || case_ii || case_iii))
    throw DomainError(
        "log-perturbed: need alpha=0 with beta<0, alpha in (0,1), or alpha=1 with beta>0");
  auto impl = std::make_shared<Impl>();
  impl->family = Family::LogPerturbed;
  impl->p.alpha = alpha;
  impl->p.beta = beta;
  impl->label = "log-perturbed";
  impl->th = scan_thresholds(*impl, std::nullopt);
  return DiffusionCoefficient(std::move(impl));
}

DiffusionCoefficient DiffusionCoefficient::iterated_log(double beta, double kappa) {
  if (!(beta > 0.0) || !(kappa > 0.0) || !std::isfinite(beta) || !std::isfinite(kappa))
    throw DomainError("iterated-log: beta and kappa must be positive");
  auto impl = std::make_shared<Impl>();
  impl->family = Family::IteratedLog;
  impl->p.beta = beta;
  impl->p.kappa = kappa;
  impl->label = "iterated-log";
  impl->th = scan_thresholds(*impl, std::nullopt);
  return DiffusionCoefficient(std::move(impl));
}

DiffusionCoefficient DiffusionCoefficient::custom(std::function<double(double)> rho,
                                                  double declared_M0,
                                                  std::optional<double> sup_abs,
                                                  std::string label) {
  if (!rho) throw DomainError("custom coefficient needs an evaluator");
  if (!(declared_M0 >= 0.0) || !std::isfinite(declared_M0))
    throw DomainError("custom coefficient: declared M0 must be finite and >= 0");
  if (sup_abs && !(*sup_abs >= 0.0)) throw DomainError("custom coefficient: sup|rho| must be >= 0");
  const HypothesisReport rep = validate_coefficient(rho, declared_M0);
  if (!rep.locally_bounded)
    throw PreconditionError("rho-locally-bounded", rep.detail);
  if (!rep.sublinear)
    throw PreconditionError("rho-sublinear", rep.detail);
  if (!rep.eventually_concave)
    throw PreconditionError("rho-eventually-concave", rep.detail);

  auto impl = std::make_shared<Impl>();
  impl->family = Family::Custom;
  impl->custom = std::move(rho);
  impl->label = std::move(label);
  impl->sup = sup_abs;
  impl->even = false;
  impl->th = scan_thresholds(*impl, declared_M0);
  return DiffusionCoefficient(std::move(impl));
}

DiffusionCoefficient DiffusionCoefficient::from_params(Family f, const CoefficientParams& p) {
  switch (f) {
    case Family::RatioPower: return ratio_power(p.alpha, p.r);
    case Family::LogPerturbed: return log_perturbed(p.alpha, p.beta);
    case Family::IteratedLog: return iterated_log(p.beta, p.kappa);
    case Family::Custom: break;
  }
  throw SpecError("custom coefficients cannot be built from parameters alone");
}

Family DiffusionCoefficient::family() const { return impl_->family; }
const CoefficientParams& DiffusionCoefficient::params() const { return impl_->p; }
const std::string& DiffusionCoefficient::label() const { return impl_->label; }
double DiffusionCoefficient::operator()(double u) const { return impl_->eval(u); }
const Thresholds& DiffusionCoefficient::thresholds() const { return impl_->th; }
std::optional<double> DiffusionCoefficient::sup_abs() const { return impl_->sup; }
bool DiffusionCoefficient::even() const { return impl_->even; }

void DiffusionCoefficient::apply(std::span<const double> in, std::span<double> out) const {
  const Impl& c = *impl_;
  const std::size_t n = in.size();
  if (c.family == Family::RatioPower && c.p.r == 0.0 && c.p.alpha == 0.5) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::sqrt(std::abs(in[i]));
    return;
  }
  if (c.family == Family::RatioPower && c.p.alpha == 0.0 && c.p.r > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      const double a = std::abs(in[i]);
      out[i] = a / (c.p.r + a);
    }
    return;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = c.eval(in[i]);
}

double DiffusionCoefficient::rho_p(double p, double x) const {
  if (!(p > 0.0)) throw DomainError("rho_p: p must be positive");
  if (!(x >= 0.0)) throw DomainError("rho_p: x must be >= 0");
  const double u = p == 2.0 ? std::sqrt(x) : std::pow(x, 1.0 / p);
  const double a = std::abs(impl_->eval(u));
  const double b = impl_->even ? a : std::abs(impl_->eval(-u));
  if (p == 2.0) return a * a + b * b;
  return std::pow(a, p) + std::pow(b, p);
}

std::string DiffusionCoefficient::describe() const {
  std::ostringstream os;
  const auto& p = impl_->p;
  switch (impl_->family) {
    case Family::RatioPower: os << "ratio-power(alpha=" << p.alpha << ", r=" << p.r << ")"; break;
    case Family::LogPerturbed: os << "log-perturbed(alpha=" << p.alpha << ", beta=" << p.beta << ")"; break;
    case Family::IteratedLog: os << "iterated-log(beta=" << p.beta << ", kappa=" << p.kappa << ")"; break;
    case Family::Custom: os << impl_->label << "(M0=" << impl_->th.M0 << ")"; break;
  }
  return os.str();
}

double eval_rho(const DiffusionCoefficient& c, double u) { return c(u); }
double rho_p(const DiffusionCoefficient& c, double p, double x) { return c.rho_p(p, x); }
Thresholds concavity_thresholds(const DiffusionCoefficient& c) { return c.thresholds(); }

double subgradient_gp(const DiffusionCoefficient& c, double p, double x) {
  if (!(p > 0.0)) throw DomainError("subgradient: p must be positive");
  const double lo = std::pow(c.thresholds().M0, p);
  if (!(x > lo)) throw DomainError("subgradient: x must exceed M0^p");
  const double h = std::max(1e-6 * x, 1e-9);
  if (x - h <= lo) return (c.rho_p(p, x + h) - c.rho_p(p, x)) / h;
  return (c.rho_p(p, x + h) - c.rho_p(p, x - h)) / (2.0 * h);
}

HypothesisReport validate_coefficient(const std::function<double(double)>& rho, double M0) {
  HypothesisReport rep;
  auto safe = [&](double u, bool& ok) {
    try {
      const double v = rho(u);
      if (!std::isfinite(v)) ok = false;
      return v;
    } catch (const std::exception&) {
      ok = false;
      return std::numeric_limits<double>::quiet_NaN();
    }
  };

  {
    bool ok = true;
    const auto g = geometric_grid(1e-6, 1e6, 2001);
    safe(0.0, ok);
    for (double u : g) {
      safe(u, ok);
      safe(-u, ok);
    }
    if (!ok) {
      rep.locally_bounded = false;
      rep.detail = "rho is not finite somewhere on [-1e6, 1e6]";
      return rep;
    }
  }

  for (double sgn : {1.0, -1.0}) {
    bool ok = true;
    std::array<double, 3> q{};
    const std::array<double, 3> xs{1e6, 1e9, 1e12};
    for (std::size_t i = 0; i < 3; ++i) q[i] = std::abs(safe(sgn * xs[i], ok)) / xs[i];
    const bool nonincreasing = q[1] <= q[0] && q[2] <= q[1];
    const bool vanishing = q[2] < q[0] || q[0] == 0.0;
    if (!ok || !nonincreasing || !vanishing) {
      rep.sublinear = false;
      std::ostringstream os;
      os << "|rho(x)/x| along x=1e6,1e9,1e12 (sign " << sgn << "): " << q[0] << ", " << q[1]
         << ", " << q[2] << " is not decreasing";
      rep.detail = os.str();
      return rep;
    }
  }

  const double start = std::max(M0 + std::max(1e-6, 1e-6 * M0), 1e-6);
  if (start < kGridHi) {
    const auto g = geometric_grid(start, kGridHi, 4000);
    for (double sgn : {1.0, -1.0}) {
      std::vector<double> f(g.size());
      bool ok = true;
      for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::abs(safe(sgn * g[i], ok));
      const long idx = last_convex_index(g, f);
      if (idx >= 0) {
        rep.eventually_concave = false;
        std::ostringstream os;
        os << "|rho| is convex near x=" << sgn * g[static_cast<std::size_t>(idx)]
           << ", beyond the declared M0=" << M0;
        rep.detail = os.str();
        return rep;
      }
    }
  }
  return rep;
}

}  // namespace subspde
