// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "../unit/generators.hpp"
#include "subspde/bounds.hpp"
#include "subspde/envelope.hpp"
#include "subspde/errors.hpp"
#include "subspde/noise.hpp"
#include "subspde/presets.hpp"
#include "subspde/sim.hpp"
#include "verify.hpp"

using namespace subspde;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << "    " << (ok ? "ok   " : "FAIL ") << what << "\n";
  }
  void note(const std::string& what) { detail << "    info " << what << "\n"; }
};

int failures = 0;

void run(int id, const std::string& name, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream rt;
  rt << std::fixed << std::setprecision(1) << "runtime " << secs << " s (budget " << budget_s << " s)";
  o.require(secs < budget_s, rt.str());
  if (!o.pass) ++failures;
  std::cout << "criterion " << id << " " << (o.pass ? "PASS" : "FAIL") << "  " << name << "\n"
            << o.detail.str() << std::flush;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

unsigned threads() { return std::max(1u, std::thread::hardware_concurrency()); }

void suite(Outcome& o, const std::string& name) {
  const auto r = tools::run_suite(name, 1);
  o.require(r.failures == 0, name + ": " + std::to_string(r.checks) + " checks, " + std::to_string(r.failures) +
                                 " failures");
  for (const auto& m : r.messages) o.note(m);
}

// Riesz and OU(alpha = 2) closed forms exactly as quoted in the reference
// table of the model; they differ from the library's definition-consistent
// constants, see the decisions ledger.
double quoted_riesz(double a, int d, double t) {
  return std::tgamma(0.5 * (d - a)) / (std::pow(2.0, 0.5 * a) * (2.0 - a) * std::tgamma(1.0 + 0.5 * d)) *
         std::pow(t, 1.0 - 0.5 * a);
}
double quoted_ou2(int d, double t) {
  if (d == 1) return std::sqrt(2.0 * t + 1.0) - 1.0;
  if (d == 2) return 0.25 * std::log1p(2.0 * t);
  return (1.0 - std::pow(1.0 + 2.0 * t, 1.0 - 0.5 * d)) / ((d - 2.0) * d);
}

void closed_form_check(Outcome& o, const std::string& label, const CorrelationKernel& k,
                       const std::function<double(double)>& closed) {
  double worst = 0.0, worst_lib = 0.0;
  for (double t : log_grid(1e-2, 1e2, 50)) {
    const double q = h_heat_quadrature(k, t);
    worst = std::max(worst, std::abs(q - closed(t)) / closed(t));
    if (auto lib = h_heat_closed(k, t)) worst_lib = std::max(worst_lib, std::abs(q - *lib) / *lib);
  }
  o.require(worst <= 1e-6, label + ": max relative error of quadrature vs quoted form " + fmt(worst));
  o.note(label + ": max relative error vs library closed form " + fmt(worst_lib));
}

void exponent_check(Outcome& o, const std::string& label, const std::function<double(double)>& h, double want) {
  const auto ts = log_grid(1e3, 1e6, 16);
  std::vector<double> hs;
  for (double t : ts) hs.push_back(h(t));
  const double s = growth_exponent(GrowthKind::Power, ts, hs);
  o.require(std::abs(s - want) <= 0.05, label + ": slope " + fmt(s) + " vs " + fmt(want));
}

SimulationConfig base_config() {
  SimulationConfig c;
  c.n = 512;
  c.L = 12.8;  // dx = 0.05
  c.scheme = HeatScheme::Implicit;
  c.dt = 0.01;
  c.kernel = CorrelationKernel::white(1);
  c.init = InitialCondition::constant(1.0);
  c.positivity_clip = false;
  c.batches = 20;
  c.threads = threads();
  return c;
}

DiffusionCoefficient unit_rho() {
  return DiffusionCoefficient::custom([](double) { return 1.0; }, 0.0, 1.0, "one");
}

const std::vector<double> kTailLevels = {1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0, 7.0, 8.0};
const std::vector<double> kSupRadii = {0.5, 1.0, 2.0, 5.0};

}  // namespace

int main() {
  std::cout << "acceptance run on " << threads() << " thread(s)\n";

  run(1, "closed-form F^{-1} against numeric inversion", 5.0, [](Outcome& o) { suite(o, "envelope"); });

  run(2, "concave inequality oracle and square-root instance", 30.0, [](Outcome& o) { suite(o, "gamma"); });

  run(3, "h(t) closed forms and asymptotic exponents", 60.0, [](Outcome& o) {
    closed_form_check(o, "white", CorrelationKernel::white(1), [](double t) { return std::sqrt(t / pi); });
    closed_form_check(o, "constant", CorrelationKernel::constant(1), [](double t) { return t; });
    for (auto [a, d] : {std::pair{0.5, 1}, std::pair{1.0, 2}, std::pair{1.5, 3}})
      closed_form_check(o, "riesz a=" + fmt(a) + " d=" + std::to_string(d), CorrelationKernel::riesz(a, d),
                        [a = a, d = d](double t) { return quoted_riesz(a, d, t); });
    for (int d : {1, 2, 3})
      closed_form_check(o, "ou2 d=" + std::to_string(d), CorrelationKernel::ornstein_uhlenbeck(2.0, d),
                        [d](double t) { return quoted_ou2(d, t); });

    for (double a : {0.25, 0.5, 0.75}) {
      const auto k = CorrelationKernel::riesz(a, 1);
      exponent_check(o, "heat riesz a=" + fmt(a), [&](double t) { return h_heat_quadrature(k, t); }, 1.0 - 0.5 * a);
    }
    // nu = d is left out: there the large-time behaviour carries a log factor
    for (auto [nu, d] : {std::pair{0.5, 1}, std::pair{3.0, 1}, std::pair{1.0, 2}, std::pair{1.5, 3}}) {
      const auto k = CorrelationKernel::bessel_spectral(nu, d);
      const double m = std::min(nu, static_cast<double>(d));
      exponent_check(o, "heat bessel-spectral nu=" + fmt(nu) + " d=" + std::to_string(d),
                     [&](double t) { return h_heat_quadrature(k, t); }, 1.0 - 0.5 * m);
    }
    for (double a : {0.25, 0.5, 0.75}) {
      const auto k = CorrelationKernel::riesz(a, 1);
      exponent_check(o, "wave riesz a=" + fmt(a), [&](double t) { return h_wave_quadrature(k, t); }, 3.0 - a);
    }
    exponent_check(o, "wave white", [](double t) { return h_wave_quadrature(CorrelationKernel::white(1), t); }, 2.0);
    exponent_check(o, "wave constant", [](double t) { return h_wave_quadrature(CorrelationKernel::constant(1), t); },
                   3.0);
  });

  // Criteria 4 and 8 share one super-Brownian ensemble.
  PathEnsemble sbm;
  run(4, "super-BM moment growth and domination by the moment bound", 600.0, [&](Outcome& o) {
    auto c = base_config();
    c.coeff = DiffusionCoefficient::ratio_power(0.5, 0.0);
    c.snapshot_times = {1.0, 2.0, 4.0, 8.0};
    c.paths = 20000;
    c.seed = 2024;
    c.moment_orders = {1.0, 2.0, 3.0};
    c.tail_levels = kTailLevels;
    c.sup_radii = kSupRadii;
    sbm = simulate(c);
    o.note("paths " + std::to_string(sbm.live_paths()) + " live, dt " + fmt(sbm.dt) + ", dx " + fmt(sbm.dx));
    const auto m = estimate_moments(sbm, {2.0, 3.0});
    for (const auto& g : m.growth) {
      const double want = 0.5 * (g.p - 1.0);
      o.require(std::abs(g.slope - want) <= 0.15,
                "p=" + fmt(g.p) + ": slope of log E[u(t,0)^p] " + fmt(g.slope) + " vs " + fmt(want));
      o.note("p=" + fmt(g.p) + ": cell-pooled slope " + fmt(g.pooled_slope));
    }
    for (const auto& r : m.rows)
      o.note("t=" + fmt(r.t) + " p=" + fmt(r.p) + ": E u^p = " + fmt(r.point.value) + " +- " + fmt(r.point.se) +
             " (pooled " + fmt(r.pooled.value) + " +- " + fmt(r.pooled.se) + ")");
    const auto cm = estimate_central_moments(sbm, {2, 3});
    for (int k : {2, 3}) {
      std::vector<double> ts, vs;
      for (const auto& r : cm)
        if (r.p == k && r.point.value > 0.0) {
          ts.push_back(r.t);
          vs.push_back(r.point.value);
        }
      if (ts.size() >= 2) o.note("central moment k=" + std::to_string(k) + ": slope " +
                                 fmt(growth_exponent(GrowthKind::Power, ts, vs)));
    }
    const auto cmp = compare(scenario_preset("alpha-white"), sbm, {2.0, 3.0});
    o.note("bound constants fitted at t=1: " + cmp.fitted_note);
    for (const auto& r : cmp.rows)
      o.require(r.pass, "t=" + fmt(r.t) + " p=" + fmt(r.p) + ": moment " + fmt(r.empirical) + " <= bound " +
                            fmt(r.bound));
  });

  run(5, "bounded coefficient variance growth", 300.0, [](Outcome& o) {
    auto c = base_config();
    c.coeff = DiffusionCoefficient::ratio_power(0.0, 1.0);
    c.snapshot_times = {1.0, 2.0, 4.0, 8.0};
    c.paths = 20000;
    c.seed = 2025;
    c.moment_orders = {1.0, 2.0};
    const auto e = simulate(c);
    const auto cm = estimate_central_moments(e, {2});
    std::vector<double> ts, vs;
    for (const auto& r : cm) {
      ts.push_back(r.t);
      vs.push_back(r.point.value);
      o.note("t=" + fmt(r.t) + ": Var u(t,0) = " + fmt(r.point.value) + " +- " + fmt(r.point.se));
    }
    const double s = growth_exponent(GrowthKind::Power, ts, vs);
    o.require(std::abs(s - 0.5) <= 0.1, "log-log slope of Var u(t,0) " + fmt(s) + " vs 0.5");
    const auto p = scenario_preset("bounded-rho");
    for (const auto& r : cm) {
      const double b = evaluate(p, r.t, 2.0).total;
      o.require(r.point.value + 1.0 <= b, "t=" + fmt(r.t) + ": E u^2 <= bound " + fmt(b));
    }
  });

  run(6, "additive noise isometry for heat and wave", 300.0, [](Outcome& o) {
    const double tol_bias = std::sqrt(0.05);  // O(dx^{1/2}) with unit constant
    {
      auto c = base_config();
      c.coeff = unit_rho();
      c.snapshot_times = {0.5, 1.0, 2.0};
      c.paths = 10000;
      c.seed = 61;
      const auto cm = estimate_central_moments(simulate(c), {2});
      for (const auto& r : cm) {
        const double h = h_heat(CorrelationKernel::white(1), r.t);
        o.require(std::abs(r.point.value - h) <= 3.0 * r.point.se + tol_bias,
                  "heat t=" + fmt(r.t) + ": Var " + fmt(r.point.value) + " +- " + fmt(r.point.se) + " vs h(t) " +
                      fmt(h));
      }
    }
    {
      auto c = base_config();
      c.equation = SimEquation::Wave;
      c.dt = 0.0;
      c.coeff = unit_rho();
      c.snapshot_times = {0.5, 1.0, 2.0};
      c.paths = 10000;
      c.seed = 62;
      const auto cm = estimate_central_moments(simulate(c), {2});
      for (const auto& r : cm) {
        const double want = 0.5 * r.t * r.t;
        o.require(std::abs(r.point.value - want) <= 3.0 * r.point.se + tol_bias * want,
                  "wave t=" + fmt(r.t) + ": Var " + fmt(r.point.value) + " +- " + fmt(r.point.se) + " vs t^2/2 " +
                      fmt(want));
        o.note("wave t=" + fmt(r.t) + ": h_wave(t) = " + fmt(h_wave(CorrelationKernel::white(1), r.t)));
      }
    }
  });

  run(7, "property suites", 120.0, [](Outcome& o) {
    test::Gen g(77);
    std::size_t concave_fail = 0, concave_n = 0;
    std::size_t jensen_fail = 0, jensen_n = 0;
    std::size_t galois_fail = 0, galois_n = 0;
    for (int rep = 0; rep < 150; ++rep) {
      const auto c = g.coefficient();
      const auto th = c.thresholds();
      for (double p : {2.0, 3.0, 4.0, 8.0}) {
        const double lo = std::max(std::pow(th.M, p), 1e-6);
        const auto grid = log_grid(lo, lo * 1e8, 200);
        for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
          // concavity on a nonuniform grid: the slope must not increase
          const double s1 = (c.rho_p(p, grid[i]) - c.rho_p(p, grid[i - 1])) / (grid[i] - grid[i - 1]);
          const double s2 = (c.rho_p(p, grid[i + 1]) - c.rho_p(p, grid[i])) / (grid[i + 1] - grid[i]);
          ++concave_n;
          if (s2 > s1 + 1e-9 * std::abs(s1) + 1e-300) ++concave_fail;
        }
      }
      const Envelope env(c);
      for (int k = 0; k < 40; ++k) {
        const double p = g.uniform(2.0, 8.0);
        const auto d = g.discrete(8, 1e6);
        double lhs = 0.0, mom = 0.0;
        for (std::size_t i = 0; i < d.atoms.size(); ++i) {
          lhs += d.probs[i] * std::pow(std::abs(c(d.atoms[i])), p);
          mom += d.probs[i] * std::pow(std::abs(d.atoms[i]), p);
        }
        const double rhs = th.K_M * th.K_M + c.rho_p(2.0, th.M * th.M + std::pow(mom, 2.0 / p));
        ++jensen_n;
        if (std::pow(lhs, 2.0 / p) > rhs * (1.0 + 1e-9)) ++jensen_fail;

        const double y = g.log_uniform(1e-4, 1e4);
        const double x = std::max(env.floor(), 1e-8) * g.log_uniform(1.0, 1e8);
        galois_n += 2;
        if (env.F(env.F_inverse(y)) < y * (1.0 - 1e-9)) ++galois_fail;
        if (!test::galois_upper_ok([&](double v) { return env.F(v); }, x, env.F_inverse(env.F(x)))) ++galois_fail;
      }
    }
    o.require(concave_fail == 0, "rho_p concavity beyond M^p: " + std::to_string(concave_fail) + " of " +
                                     std::to_string(concave_n) + " grid slopes increase");
    o.require(jensen_fail == 0, "moment transfer through rho: " + std::to_string(jensen_fail) + " of " +
                                    std::to_string(jensen_n) + " violated");
    o.require(galois_fail == 0, "F / F^{-1} Galois inequalities: " + std::to_string(galois_fail) + " of " +
                                    std::to_string(galois_n) + " violated");

    auto c = base_config();
    c.n = 256;
    c.L = 6.4;
    c.coeff = DiffusionCoefficient::ratio_power(0.5, 0.0);
    c.snapshot_times = {0.5, 1.0};
    c.paths = 1000;
    c.seed = 71;
    const auto ens = simulate(c);
    for (const auto& r : estimate_moments(ens, {1.0}).rows)
      o.require(std::abs(r.pooled.value - 1.0) <= 4.0 * r.pooled.se,
                "mean preservation t=" + fmt(r.t) + ": " + fmt(r.pooled.value) + " +- " + fmt(r.pooled.se));
    auto clipped = c;
    clipped.positivity_clip = true;
    clipped.paths = 200;
    double min_seen = 1e300;
    for (const auto& p : simulate(clipped).paths)
      for (double v : p.field_min) min_seen = std::min(min_seen, v);
    o.require(min_seen >= 0.0, "positivity with the clip: smallest cell value " + fmt(min_seen));

    auto rc = c;
    rc.paths = 64;
    rc.kernel = CorrelationKernel::riesz(0.5, 1);
    std::string first;
    for (unsigned th : {1u, 2u, 3u, 5u}) {
      rc.threads = th;
      std::ostringstream os;
      write_ensemble_csv(simulate(rc), os);
      if (first.empty()) first = os.str();
      o.require(os.str() == first, "bit-exact ensemble with " + std::to_string(th) + " thread(s)");
    }
  });

  run(8, "super-BM tail shape and bounded sup ratio", 600.0, [&](Outcome& o) {
    if (sbm.paths.empty()) throw EstimatorError("criterion 4 ensemble is missing");
    const auto tail = estimate_tail(sbm, 1.0, kTailLevels);
    std::vector<double> lz, ll;
    for (const auto& r : tail) {
      o.note("z=" + fmt(r.z) + ": P = " + fmt(r.frequency) + " [" + fmt(r.wilson_lo) + ", " + fmt(r.wilson_hi) +
             "] count " + std::to_string(r.count) + (r.censored ? " censored" : ""));
      if (r.censored || r.frequency >= 0.5) continue;
      lz.push_back(std::log(r.z));
      ll.push_back(std::log(-std::log(r.frequency)));
    }
    o.require(lz.size() >= 3, std::to_string(lz.size()) + " resolvable tail levels");
    if (lz.size() >= 3) {
      const double s = linear_fit(lz, ll).first;
      o.require(std::abs(s - 1.0) <= 0.3, "slope of log(-log P) vs log z " + fmt(s) + " vs 1");
    }

    // R is measured in grid cells inside the asymptote; C is fitted at the
    // smallest radius so the ratio starts at one.
    const double t = 2.0;
    const auto sup = estimate_spatial_sup(sbm, t, kSupRadii);
    const auto rho = DiffusionCoefficient::ratio_power(0.5, 0.0);
    const auto k = CorrelationKernel::white(1);
    auto asym = [&](double R, double C) { return spatial_asymptote(rho, k, t, R / sbm.dx, EquationKind::Heat, C); };
    const double target = sup.front().mean.value;
    double lo = 1e-12, hi = 1e12;
    for (int i = 0; i < 200; ++i) {
      const double mid = std::sqrt(lo * hi);
      (asym(sup.front().R, mid) < target ? lo : hi) = mid;
    }
    const double C = std::sqrt(lo * hi);
    o.note("fitted C = " + fmt(C) + " at R = " + fmt(sup.front().R));
    for (const auto& r : sup) {
      const double ratio = r.mean.value / asym(r.R, C);
      o.require(ratio >= 0.2 && ratio <= 1.0 + 1e-9,
                "R=" + fmt(r.R) + ": mean sup " + fmt(r.mean.value) + ", ratio " + fmt(ratio));
    }
  });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << "\n";
  return failures;
}
