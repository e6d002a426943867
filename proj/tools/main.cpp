#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "subspde/config.hpp"
#include "subspde/errors.hpp"
#include "subspde/presets.hpp"
#include "subspde/sim.hpp"
#include "verify.hpp"

namespace fs = std::filesystem;
using namespace subspde;

namespace {

enum Exit { kOk = 0, kFail = 1, kSpec = 2, kNumeric = 3 };

// Options shared by the subcommands that build an ExperimentSpec.
struct Common {
  std::string config;
  std::string preset;
  std::optional<double> alpha, beta, kappa, b, ell;
  std::optional<int> d;
  std::optional<std::string> t, p, x, z, R;
  std::optional<std::string> regime;
  std::optional<double> C, C_star;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> out;
  std::optional<std::size_t> paths, n;
  std::optional<double> L, dt;
  std::optional<std::string> scheme;
  bool clip = false;
};

void add_pipeline_options(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "JSON configuration file");
  app->add_option("--preset", c.preset, "scenario preset (see `subspde presets`)");
  app->add_option("--alpha", c.alpha, "preset parameter alpha");
  app->add_option("--beta", c.beta, "preset parameter beta");
  app->add_option("--kappa", c.kappa, "preset parameter kappa");
  app->add_option("--b", c.b, "time-fractional order b");
  app->add_option("--ell", c.ell, "initial-data parameter ell");
  app->add_option("--d", c.d, "spatial dimension for alpha-riesz-dn");
  app->add_option("--t", c.t, "comma-separated times");
  app->add_option("--p", c.p, "comma-separated moment orders");
  app->add_option("--regime", c.regime, "auto|general|concave|asymptotic|bounded-initial|bounded-coefficient");
  app->add_option("--C", c.C, "constant C");
  app->add_option("--C-star", c.C_star, "constant C_*");
  app->add_option("--seed", c.seed, "base seed");
  app->add_option("--threads", c.threads, "worker threads (0 = all cores)");
  app->add_option("--out", c.out, "output directory");
}

void add_sim_options(CLI::App* app, Common& c) {
  app->add_option("--paths", c.paths, "Monte Carlo paths");
  app->add_option("--n", c.n, "grid cells");
  app->add_option("--L", c.L, "domain half-length");
  app->add_option("--dt", c.dt, "time step (default: scheme default)");
  app->add_option("--scheme", c.scheme, "explicit|implicit|spectral");
  app->add_flag("--clip", c.clip, "clip the heat field at 0 after every step");
  app->add_option("--z", c.z, "comma-separated tail levels");
  app->add_option("--R", c.R, "comma-separated sup radii");
}

ExperimentSpec build_spec(const Common& c) {
  ExperimentSpec s;
  if (!c.config.empty()) s = load_experiment(c.config);
  if (!c.preset.empty()) s.preset = c.preset;
  if (c.alpha) s.preset_options.alpha = c.alpha;
  if (c.beta) s.preset_options.beta = c.beta;
  if (c.kappa) s.preset_options.kappa = c.kappa;
  if (c.b) s.preset_options.b = c.b;
  if (c.ell) s.preset_options.ell = c.ell;
  if (c.d) s.preset_options.d = c.d;
  if (c.t) s.t = parse_grid(*c.t);
  if (c.p) s.p = parse_grid(*c.p);
  if (c.x) s.x = parse_grid(*c.x);
  if (c.z) s.z = parse_grid(*c.z);
  if (c.R) s.R = parse_grid(*c.R);
  if (c.regime) s.regime = regime_from_string(*c.regime);
  if (c.C) s.constants.C = *c.C;
  if (c.C_star) s.constants.C_star = *c.C_star;
  if (c.seed) s.seed = *c.seed;
  if (c.threads) s.threads = *c.threads;
  if (c.out) s.out_dir = *c.out;
  if (c.paths) s.sim.paths = c.paths;
  if (c.n) s.sim.n = c.n;
  if (c.L) s.sim.L = c.L;
  if (c.dt) s.sim.dt = c.dt;
  if (c.scheme) s.sim.scheme = heat_scheme_from_string(*c.scheme);
  if (c.clip) s.sim.positivity_clip = true;
  s.validate();
  return s;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SpecError("cannot write '" + path.string() + "'");
  out << text;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// FNV-1a, printed so that two runs can be compared at a glance.
std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

int cmd_bound(const Common& c, bool json_out) {
  const ExperimentSpec spec = build_spec(c);
  const Preset preset = spec.resolve();
  const std::vector<double> ts = spec.t.value_or(std::vector<double>{1.0, 2.0, 4.0, 8.0});
  const std::vector<double> ps = spec.p.value_or(std::vector<double>{preset.p});
  const std::vector<double> xs = spec.x.value_or(std::vector<double>{preset.x});
  std::ostringstream csv, js;
  csv << "t,x,p,term_J0sq,term_J1_over_h,term_KM,term_Finv,total,regime,sigma\n";
  js << "[";
  bool first = true;
  for (double t : ts) {
    for (double x : xs) {
      for (double p : ps) {
        Preset at = preset;
        at.x = x;
        const BoundReport r = evaluate(at, t, p);
        csv << fmt(r.t) << ',' << fmt(r.x) << ',' << fmt(r.p) << ',' << fmt(r.term_J0sq) << ','
            << fmt(r.term_J1_over_h) << ',' << fmt(r.term_KM) << ',' << fmt(r.term_Finv) << ',' << fmt(r.total)
            << ',' << to_string(r.regime) << ',' << (r.sigma ? fmt(*r.sigma) : "") << '\n';
        js << (first ? "" : ",") << "\n  {\"equation\": \"" << to_string(r.equation) << "\", \"regime\": \""
           << to_string(r.regime) << "\", \"t\": " << fmt(r.t) << ", \"x\": " << fmt(r.x)
           << ", \"p\": " << fmt(r.p) << ", \"h\": " << fmt(r.h) << ", \"term_J0sq\": " << fmt(r.term_J0sq)
           << ", \"term_J1_over_h\": " << fmt(r.term_J1_over_h) << ", \"term_KM\": " << fmt(r.term_KM)
           << ", \"term_Finv\": " << fmt(r.term_Finv) << ", \"total\": " << fmt(r.total)
           << ", \"sigma\": " << (r.sigma ? fmt(*r.sigma) : "null") << "}";
        first = false;
      }
    }
  }
  js << "\n]\n";
  std::cout << (json_out ? js.str() : csv.str());
  if (c.out) {
    const fs::path dir = spec.out_dir;
    write_file(dir / "bound.csv", csv.str());
    write_file(dir / "bound.json", js.str());
    write_file(dir / "manifest.json", manifest("bound", spec));
  }
  return kOk;
}

int cmd_simulate(const Common& c, bool dump) {
  const ExperimentSpec spec = build_spec(c);
  const std::vector<double> ts = spec.t.value_or(std::vector<double>{1.0});
  SimulationConfig cfg = spec.simulation(ts);
  cfg.keep_path0 = dump;
  const PathEnsemble ens = simulate(cfg);
  std::ostringstream csv;
  write_ensemble_csv(ens, csv);
  const fs::path dir = spec.out_dir;
  write_file(dir / "ensemble.csv", csv.str());
  write_file(dir / "manifest.json", manifest("simulate", spec, cfg));
  if (dump) {
    std::ostringstream bin;
    write_snapshot_binary(ens, bin);
    write_file(dir / "path0.sspd", bin.str());
  }
  std::cout << "paths " << ens.paths.size() << ", aborted " << ens.aborted.size() << ", dt " << ens.dt << ", dx "
            << ens.dx << "\n";
  std::cout << "ensemble.csv fnv1a " << std::hex << std::setw(16) << std::setfill('0') << fnv1a(csv.str())
            << std::dec << "\n";
  if (!ens.aborted.empty()) {
    std::cout << "aborted paths:";
    for (std::size_t i : ens.aborted) std::cout << ' ' << i << "(t=" << ens.paths[i].abort_time << ")";
    std::cout << "\n";
  }
  return kOk;
}

int cmd_compare(const Common& c) {
  ExperimentSpec spec = build_spec(c);
  if (!spec.sim.paths) spec.sim.paths = 10000;
  const Preset preset = spec.resolve();
  const std::vector<double> ts = spec.t.value_or(std::vector<double>{1.0, 2.0, 4.0, 8.0});
  const std::vector<double> ps = spec.p.value_or(std::vector<double>{2.0, 3.0});
  const SimulationConfig cfg = spec.simulation(ts);
  const PathEnsemble ens = simulate(cfg);
  const CompareResult res = compare(preset, ens, ps);
  std::ostringstream csv;
  csv << "t,p,empirical,lower,bound,verdict\n";
  for (const auto& r : res.rows)
    csv << fmt(r.t) << ',' << fmt(r.p) << ',' << fmt(r.empirical) << ',' << fmt(r.lower) << ',' << fmt(r.bound)
        << ',' << (r.pass ? "PASS" : "FAIL") << '\n';
  std::cout << "preset " << preset.name << ", paths " << ens.live_paths() << " live of " << ens.paths.size() << "\n";
  if (!res.fitted_note.empty()) std::cout << "fitted at t=" << ts.front() << ": " << res.fitted_note << "\n";
  std::cout << std::left << std::setw(10) << "t" << std::setw(6) << "p" << std::setw(16) << "empirical"
            << std::setw(16) << "bound" << "verdict\n";
  for (const auto& r : res.rows)
    std::cout << std::setw(10) << r.t << std::setw(6) << r.p << std::setw(16) << r.empirical << std::setw(16)
              << r.bound << (r.pass ? "PASS" : "FAIL") << "\n";
  if (c.out) {
    const fs::path dir = spec.out_dir;
    write_file(dir / "compare.csv", csv.str());
    write_file(dir / "manifest.json", manifest("compare", spec, cfg));
  }
  return res.all_pass ? kOk : kFail;
}

int cmd_verify(const std::string& suite, std::uint64_t seed) {
  std::vector<std::string> names = suite == "all" ? tools::suite_names() : std::vector<std::string>{suite};
  std::size_t failures = 0;
  for (const auto& n : names) {
    const tools::SuiteResult r = tools::run_suite(n, seed);
    std::cout << r.name << ": " << r.checks << " checks, " << r.failures << " failures\n";
    for (const auto& m : r.messages) std::cout << "  " << m << "\n";
    failures += r.failures;
  }
  return failures == 0 ? kOk : kFail;
}

int cmd_presets(bool check) {
  int status = kOk;
  for (const auto& name : preset_names()) {
    const Preset s = scenario_preset(name);
    std::cout << std::left << std::setw(22) << name << std::setw(12) << to_string(s.equation) << std::setw(20)
              << to_string(s.regime) << std::setw(14) << to_string(s.growth) << "exponent " << std::setw(8)
              << s.nominal_exponent << (s.simulable ? "simulable" : "bounds only") << "\n";
    std::cout << "    " << s.description << "\n";
    if (check) {
      const ExponentCheck e = preset_exponent(s);
      const bool ok = std::abs(e.fitted - e.predicted) <= 0.05;
      std::cout << "    regression over t in [" << s.t_lo << ", " << s.t_hi << "]: bound " << e.fitted << ", shape "
                << e.predicted << (ok ? "  PASS" : "  FAIL") << "\n";
      if (!ok) status = kFail;
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moment bounds and Monte Carlo checks for SPDEs with sublinear diffusion"};
  app.require_subcommand(1);
  app.set_version_flag("--version", library_version());

  Common common;
  bool json_out = false, dump = false, check = false;
  std::string suite = "all";
  std::uint64_t verify_seed = 1;

  auto* bound = app.add_subcommand("bound", "evaluate moment bounds on a (t, x, p) grid");
  add_pipeline_options(bound, common);
  bound->add_option("--x", common.x, "comma-separated points (first coordinate)");
  bound->add_flag("--json", json_out, "print JSON records instead of CSV");

  auto* sim = app.add_subcommand("simulate", "run a Monte Carlo ensemble and write its statistics");
  add_pipeline_options(sim, common);
  add_sim_options(sim, common);
  sim->add_flag("--dump", dump, "also write raw snapshots of path 0 (path0.sspd)");

  auto* cmp = app.add_subcommand("compare", "empirical moments against the bound, PASS/FAIL per grid point");
  add_pipeline_options(cmp, common);
  add_sim_options(cmp, common);

  auto* ver = app.add_subcommand("verify", "run the oracle suites");
  ver->add_option("--suite", suite, "envelope|gamma|h|noise|all");
  ver->add_option("--seed", verify_seed, "seed of the randomized suites");

  auto* pre = app.add_subcommand("presets", "list the scenario presets");
  pre->add_flag("--check", check, "run the exponent regression of every preset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kSpec;
  }

  try {
    if (*bound) return cmd_bound(common, json_out);
    if (*sim) return cmd_simulate(common, dump);
    if (*cmp) return cmd_compare(common);
    if (*ver) return cmd_verify(suite, verify_seed);
    if (*pre) return cmd_presets(check);
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSpec;
  } catch (const PreconditionError& e) {
    std::cerr << "error: hypothesis " << e.hypothesis() << " failed: " << e.what() << "\n";
    return kNumeric;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSpec;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
  return kOk;
}
