#include "subspde/presets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "subspde/envelope.hpp"
#include "subspde/errors.hpp"

namespace subspde {

namespace {

using std::numbers::pi;

const std::vector<std::string> kNames = {
    "alpha-white", "alpha-riesz-d1", "alpha-riesz-dn", "alpha-powerlaw-init", "alpha-exp-init", "log-case-i",
    "log-case-ii", "log-case-iii",   "vsv",            "bounded-rho",         "frac-alpha",     "wave-alpha",
};

// p sqrt(t/pi): the argument of F^{-1} in the bounded-initial regime with
// white noise in d = 1 and unit constants.
double white_arg(double t, double p) { return p * std::sqrt(t / pi); }

Preset alpha_base(const std::string& name, double alpha) {
  Preset s;
  s.name = name;
  s.coeff = DiffusionCoefficient::ratio_power(alpha, 0.0);
  s.regime = Regime::BoundedInitial;
  return s;
}

}  // namespace

std::string to_string(GrowthKind g) {
  switch (g) {
    case GrowthKind::Power: return "power";
    case GrowthKind::Stretched: return "stretched";
    case GrowthKind::IteratedLog: return "iterated-log";
    case GrowthKind::Exponential: return "exponential";
  }
  return "unknown";
}

std::vector<std::string> preset_names() { return kNames; }

Preset scenario_preset(const std::string& name, const PresetOptions& o) {
  Preset s;
  if (name == "alpha-white") {
    const double a = o.alpha.value_or(0.5);
    s = alpha_base(name, a);
    s.description = "rho(u) = |u|^alpha, white noise, bounded data: ||u||_p^2 ~ (p sqrt t)^{1/(1-alpha)}";
    s.shape = [a](double t, double p) { return std::pow(p * std::sqrt(t), 1.0 / (1.0 - a)); };
    s.nominal_exponent = 0.5 / (1.0 - a);
    s.simulable = true;
  } else if (name == "alpha-riesz-d1" || name == "alpha-riesz-dn") {
    const double a = o.alpha.value_or(0.5);
    const double beta = o.beta.value_or(0.5);
    const int d = name == "alpha-riesz-d1" ? 1 : o.d.value_or(3);
    s = alpha_base(name, a);
    s.kernel = CorrelationKernel::riesz(beta, d);
    s.description = "rho(u) = |u|^alpha, Riesz noise: ||u||_p^2 ~ (p t^{1-beta/2})^{1/(1-alpha)}";
    s.shape = [a, beta](double t, double p) { return std::pow(p * std::pow(t, 1.0 - 0.5 * beta), 1.0 / (1.0 - a)); };
    s.nominal_exponent = (1.0 - 0.5 * beta) / (1.0 - a);
    s.simulable = d == 1;
  } else if (name == "alpha-powerlaw-init") {
    const double a = o.alpha.value_or(0.5);
    const double beta = o.beta.value_or(0.5);
    const double ell = o.ell.value_or(0.5);
    s = alpha_base(name, a);
    s.kernel = CorrelationKernel::riesz(beta, 1);
    s.init = InitialCondition::power_law(ell);
    s.regime = Regime::Concave;
    s.description = "rho(u) = |u|^alpha, Riesz noise, |x|^{-ell} data: the F^{-1} term dominates at large t";
    s.shape = [a, beta](double t, double p) { return std::pow(p * std::pow(t, 1.0 - 0.5 * beta), 1.0 / (1.0 - a)); };
    s.nominal_exponent = (1.0 - 0.5 * beta) / (1.0 - a);
    s.simulable = ell < 1.0;
  } else if (name == "alpha-exp-init") {
    const double a = o.alpha.value_or(0.5);
    const double beta = o.beta.value_or(0.5);
    const double ell = o.ell.value_or(0.5);
    s = alpha_base(name, a);
    s.kernel = CorrelationKernel::riesz(beta, 1);
    s.init = InitialCondition::exponential(ell);
    s.regime = Regime::Concave;
    s.growth = GrowthKind::Exponential;
    // below t ~ 10^2 the F^{-1} term still dominates e^{ell^2 t}
    s.t_lo = 1e2;
    s.t_hi = 1e3;
    s.description = "rho(u) = |u|^alpha, e^{ell|x|} data: the J0 term grows like e^{ell^2 t}";
    s.shape = [ell](double t, double) { return std::exp(ell * ell * t); };
    s.nominal_exponent = ell * ell;
    s.simulable = false;  // the data are unbounded on the periodic grid
  } else if (name == "log-case-i" || name == "log-case-ii") {
    const bool first = name == "log-case-i";
    const double a = o.alpha.value_or(first ? 0.0 : 0.5);
    const double beta = o.beta.value_or(first ? -0.5 : 0.5);
    s.name = name;
    s.coeff = DiffusionCoefficient::log_perturbed(a, beta);
    s.regime = Regime::BoundedInitial;
    s.description = "rho(u) = |u|^alpha log(e+u^2)^{-beta}: ||u||_p^2 ~ (p sqrt t)^{1/(1-alpha)} log(p sqrt t)^{-2beta/(1-alpha)}";
    s.shape = [a, beta](double t, double p) {
      const double y = white_arg(t, p);
      return std::pow(8.0 * y, 1.0 / (1.0 - a)) * std::pow(std::log(8.0 * y) / (1.0 - a), -2.0 * beta / (1.0 - a));
    };
    s.nominal_exponent = 0.5 / (1.0 - a);
    s.simulable = true;
  } else if (name == "log-case-iii") {
    const double beta = o.beta.value_or(1.0);
    s.name = name;
    s.coeff = DiffusionCoefficient::log_perturbed(1.0, beta);
    s.regime = Regime::BoundedInitial;
    s.growth = GrowthKind::Stretched;
    s.description = "rho(u) = |u| log(e+u^2)^{-beta}: ||u||_p^2 ~ exp(C (p^2 t)^{1/(4 beta*)})";
    s.shape = [beta](double t, double p) { return std::exp(std::pow(8.0 * white_arg(t, p), 0.5 / beta)); };
    // The exponent of t is capped at the parabolic Anderson value 1.
    s.nominal_exponent = 1.0 / (4.0 * std::max(beta, 0.25));
    s.simulable = true;
  } else if (name == "vsv") {
    const double beta = o.beta.value_or(1.0);
    const double kappa = o.kappa.value_or(2.0);
    s.name = name;
    s.coeff = DiffusionCoefficient::iterated_log(beta, kappa);
    s.regime = Regime::BoundedInitial;
    s.growth = GrowthKind::IteratedLog;
    // F^{-1} sits on its 2M^2 floor until p sqrt(t) ~ 10^4
    s.t_lo = 1e10;
    s.t_hi = 1e20;
    s.description = "rho(u) = |u| exp(-beta loglog(e+u^2)^kappa): double-exponential moment bound";
    s.shape = [beta, kappa](double t, double p) {
      const double c = 8.0 / std::sqrt(pi);
      return std::exp(std::exp(std::pow(std::log(c * p * std::sqrt(t)) / (2.0 * beta), 1.0 / kappa)));
    };
    s.nominal_exponent = 1.0 / kappa;
    s.simulable = true;
  } else if (name == "bounded-rho") {
    s.name = name;
    s.coeff = DiffusionCoefficient::ratio_power(0.0, 1.0);
    s.regime = Regime::BoundedCoefficient;
    s.description = "rho(u) = u/(1+|u|): ||u||_p^2 <= 2 J0^2 + 8 p h(t)";
    s.shape = [](double t, double p) { return 2.0 + 8.0 * white_arg(t, p); };
    s.nominal_exponent = 0.5;
    s.simulable = true;
  } else if (name == "frac-alpha") {
    const double a = o.alpha.value_or(0.5);
    const double b = o.b.value_or(1.0);
    s = alpha_base(name, a);
    s.equation = EquationKind::Fractional;
    s.frac = FractionalParams{2.0, b, 0.0, 1};
    check_fractional_params(s.frac);
    s.description = "time-fractional heat equation, rho(u) = |u|^alpha: ||u||_p^2 ~ (p t^{3b/2-1})^{1/(1-alpha)}";
    s.shape = [a, b](double t, double p) { return std::pow(p * std::pow(t, 1.5 * b - 1.0), 1.0 / (1.0 - a)); };
    s.nominal_exponent = (1.5 * b - 1.0) / (1.0 - a);
    s.simulable = false;
  } else if (name == "wave-alpha") {
    const double a = o.alpha.value_or(0.5);
    s = alpha_base(name, a);
    s.equation = EquationKind::Wave;
    s.regime = Regime::General;
    s.description = "wave equation, rho(u) = |u|^alpha, u0 = 1, v0 = 0: ||u||_p^2 ~ (p t^2)^{1/(1-alpha)}";
    s.shape = [a](double t, double p) { return std::pow(p * t * t, 1.0 / (1.0 - a)); };
    s.nominal_exponent = 2.0 / (1.0 - a);
    s.simulable = true;
  } else {
    std::string known;
    for (const auto& n : kNames) known += (known.empty() ? "" : ", ") + n;
    throw SpecError("unknown preset '" + name + "' (known: " + known + ")");
  }
  return s;
}

BoundReport evaluate(const Preset& s, double t, double p) { return evaluate(s, t, p, s.constants); }

BoundReport evaluate(const Preset& s, double t, double p, const BoundConstants& c) {
  std::vector<double> x(static_cast<std::size_t>(s.kernel.dim()), 0.0);
  x.front() = s.x;
  switch (s.equation) {
    case EquationKind::Heat: return moment_bound_heat(s.coeff, s.kernel, s.init, t, x, p, s.regime, c);
    case EquationKind::Wave: return moment_bound_wave(s.coeff, s.kernel, s.init, s.velocity, t, s.x, p, c);
    case EquationKind::Fractional: return moment_bound_fractional(s.coeff, s.frac, s.init, t, x, p, s.regime, c);
  }
  throw SpecError("unknown equation");
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw SpecError("log grid needs 0 < lo < hi and n >= 2");
  std::vector<double> g(n);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  g.back() = hi;
  return g;
}

double growth_exponent(GrowthKind kind, const std::vector<double>& t, const std::vector<double>& v) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    double x = 0.0, y = 0.0;
    switch (kind) {
      case GrowthKind::Power:
        x = std::log(t[i]);
        y = std::log(v[i]);
        break;
      case GrowthKind::Stretched:
        x = std::log(t[i]);
        y = std::log(std::log(v[i]));
        break;
      case GrowthKind::IteratedLog:
        x = std::log(std::log(t[i]));
        y = std::log(std::log(std::log(v[i])));
        break;
      case GrowthKind::Exponential:
        x = t[i];
        y = std::log(v[i]);
        break;
    }
    if (!std::isfinite(x) || !std::isfinite(y))
      throw EstimatorError("growth regression needs values in the domain of the iterated logarithms");
    xs.push_back(x);
    ys.push_back(y);
  }
  return linear_fit(xs, ys).first;
}

ExponentCheck preset_exponent(const Preset& s, std::size_t points) {
  const auto ts = log_grid(s.t_lo, s.t_hi, points);
  std::vector<double> totals, shapes;
  for (double t : ts) {
    totals.push_back(evaluate(s, t, s.p).total);
    shapes.push_back(s.shape(t, s.p));
  }
  return {growth_exponent(s.growth, ts, totals), growth_exponent(s.growth, ts, shapes), s.nominal_exponent};
}

SimulationConfig simulation_config(const Preset& s, const std::vector<double>& times, std::size_t paths,
                                   std::uint64_t seed) {
  if (!s.simulable) throw UnsupportedError("preset '" + s.name + "' has no simulation counterpart");
  if (times.empty()) throw SpecError("empty grid");
  SimulationConfig c;
  c.equation = s.equation == EquationKind::Wave ? SimEquation::Wave : SimEquation::Heat;
  c.kernel = s.kernel;
  c.coeff = s.coeff;
  c.init = s.init;
  c.velocity = s.velocity;
  c.snapshot_times = times;
  c.paths = paths;
  c.seed = seed;
  const double dx = 0.05;
  const double T = *std::max_element(times.begin(), times.end());
  // boundary guideline for the heat flow; the wave front needs L > T
  const double want = std::max(12.8, c.equation == SimEquation::Wave ? T + 2.0 : 5.0 * std::sqrt(T));
  std::size_t n = static_cast<std::size_t>(std::ceil(2.0 * want / dx));
  n = (n + 63) / 64 * 64;
  c.n = n;
  c.L = 0.5 * dx * static_cast<double>(n);
  c.moment_orders = {1.0, 2.0, 3.0, 4.0};
  if (std::find(c.moment_orders.begin(), c.moment_orders.end(), s.p) == c.moment_orders.end())
    c.moment_orders.push_back(s.p);
  return c;
}

CompareResult compare(const Preset& s, const PathEnsemble& ens, const std::vector<double>& ps) {
  if (ps.empty()) throw SpecError("empty grid");
  CompareResult out;
  out.fitted = s.constants;
  const bool fit_star = s.equation == EquationKind::Heat && s.regime == Regime::BoundedInitial;
  const bool fit_c = s.equation == EquationKind::Heat && s.regime == Regime::Asymptotic;
  const bool pooled_ok = s.init.variant() == InitialVariant::Constant;
  const MomentTable table = estimate_moments(ens, ps);
  const double t0 = *std::min_element(ens.times.begin(), ens.times.end());
  for (double p : ps) {
    BoundConstants c = s.constants;
    std::vector<const MomentRow*> rows;
    for (const auto& r : table.rows)
      if (r.p == p) rows.push_back(&r);
    auto moment = [&](const MomentRow& r) {
      // with constant data every cell has the law of u(t, 0)
      return pooled_ok && std::isfinite(r.pooled.value) ? r.pooled : r.point;
    };
    if (fit_star || fit_c) {
      const MomentRow* first = nullptr;
      for (const auto* r : rows)
        if (r->t == t0) first = r;
      const double target = std::pow(std::max(moment(*first).value, 0.0), 2.0 / p);
      auto value = [&](double k) {
        BoundConstants cc = c;
        (fit_star ? cc.C_star : cc.C) = k;
        return evaluate(s, t0, p, cc).total;
      };
      // the bound is increasing in the constant; bisect on log k
      double lo = 1e-8, hi = 1e8;
      if (value(lo) >= target) {
        hi = lo;
      } else {
        while (value(hi) < target && hi < 1e300) hi *= 1e4;
        for (int i = 0; i < 200 && hi / lo > 1.0 + 1e-12; ++i) {
          const double mid = std::sqrt(lo * hi);
          (value(mid) < target ? lo : hi) = mid;
        }
      }
      (fit_star ? c.C_star : c.C) = hi;
      out.fitted = c;
      out.fitted_note += (out.fitted_note.empty() ? "" : "; ") + std::string(fit_star ? "C_star" : "C") + "(p=" +
                         std::to_string(p) + ")=" + std::to_string(hi);
    }
    for (const auto* r : rows) {
      CompareRow row;
      row.t = r->t;
      row.p = p;
      const Estimate m = moment(*r);
      row.empirical = std::pow(std::max(m.value, 0.0), 2.0 / p);
      row.lower = std::pow(std::max(m.value - 3.0 * m.se, 0.0), 2.0 / p);
      row.bound = evaluate(s, r->t, p, c).total;
      row.pass = row.lower <= row.bound * (1.0 + 1e-12);
      out.all_pass = out.all_pass && row.pass;
      out.rows.push_back(row);
    }
  }
  return out;
}

}  // namespace subspde
