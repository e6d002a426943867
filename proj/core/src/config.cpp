#include "subspde/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "subspde/errors.hpp"

#ifndef SUBSPDE_VERSION
#define SUBSPDE_VERSION "unknown"
#endif

namespace subspde {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw SpecError(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw SpecError("unknown key '" + it.key() + "' in " + where);
}

template <class T>
T get(const json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw SpecError(where + "." + key + ": " + e.what());
  }
}

template <class T>
std::optional<T> get_opt(const json& j, const std::string& key, const std::string& where) {
  // null is what to_json writes for unset fields
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get<T>(j, key, where);
}

DiffusionCoefficient coeff_from_json(const json& j) {
  reject_unknown(j, {"family", "alpha", "beta", "kappa", "r"}, "coeff");
  const Family f = family_from_string(get<std::string>(j, "family", "coeff"));
  if (f == Family::Custom) throw SpecError("custom coefficients cannot be read from a configuration file");
  CoefficientParams p;
  p.alpha = get_opt<double>(j, "alpha", "coeff").value_or(0.0);
  p.beta = get_opt<double>(j, "beta", "coeff").value_or(0.0);
  p.kappa = get_opt<double>(j, "kappa", "coeff").value_or(0.0);
  p.r = get_opt<double>(j, "r", "coeff").value_or(0.0);
  return DiffusionCoefficient::from_params(f, p);
}

json coeff_to_json(const DiffusionCoefficient& c) {
  const auto& p = c.params();
  json j{{"family", to_string(c.family())}};
  switch (c.family()) {
    case Family::RatioPower: j["alpha"] = p.alpha; j["r"] = p.r; break;
    case Family::LogPerturbed: j["alpha"] = p.alpha; j["beta"] = p.beta; break;
    case Family::IteratedLog: j["beta"] = p.beta; j["kappa"] = p.kappa; break;
    case Family::Custom: j["label"] = c.label(); break;
  }
  return j;
}

CorrelationKernel kernel_from_json(const json& j) {
  reject_unknown(j, {"variant", "alpha", "nu", "d"}, "kernel");
  const KernelVariant v = kernel_variant_from_string(get<std::string>(j, "variant", "kernel"));
  const int d = get_opt<int>(j, "d", "kernel").value_or(1);
  double param = 0.0;
  if (v == KernelVariant::Riesz || v == KernelVariant::OrnsteinUhlenbeck) param = get<double>(j, "alpha", "kernel");
  if (v == KernelVariant::BesselPotential || v == KernelVariant::BesselSpectral) param = get<double>(j, "nu", "kernel");
  return CorrelationKernel::make(v, param, d);
}

json kernel_to_json(const CorrelationKernel& k) {
  json j{{"variant", to_string(k.variant())}, {"d", k.dim()}};
  switch (k.variant()) {
    case KernelVariant::Riesz:
    case KernelVariant::OrnsteinUhlenbeck: j["alpha"] = k.param(); break;
    case KernelVariant::BesselPotential:
    case KernelVariant::BesselSpectral: j["nu"] = k.param(); break;
    default: break;
  }
  return j;
}

InitialCondition init_from_json(const json& j, const std::string& where) {
  reject_unknown(j, {"variant", "c", "mass", "ell"}, where);
  const InitialVariant v = initial_variant_from_string(get<std::string>(j, "variant", where));
  switch (v) {
    case InitialVariant::Constant: return InitialCondition::constant(get_opt<double>(j, "c", where).value_or(1.0));
    case InitialVariant::Dirac: return InitialCondition::dirac(get_opt<double>(j, "mass", where).value_or(1.0));
    case InitialVariant::PowerLaw: return InitialCondition::power_law(get<double>(j, "ell", where));
    case InitialVariant::Exponential: return InitialCondition::exponential(get<double>(j, "ell", where));
    case InitialVariant::Custom: break;
  }
  throw SpecError("custom initial data cannot be read from a configuration file");
}

json init_to_json(const InitialCondition& mu) {
  json j{{"variant", to_string(mu.variant())}};
  switch (mu.variant()) {
    case InitialVariant::Constant: j["c"] = mu.param(); break;
    case InitialVariant::Dirac: j["mass"] = mu.param(); break;
    case InitialVariant::PowerLaw:
    case InitialVariant::Exponential: j["ell"] = mu.param(); break;
    case InitialVariant::Custom: j["label"] = mu.describe(); break;
  }
  return j;
}

void check_grid(const std::optional<std::vector<double>>& g, const char* name) {
  if (!g) return;
  if (g->empty()) throw SpecError(std::string("empty grid: ") + name);
  for (std::size_t i = 0; i < g->size(); ++i) {
    if (!std::isfinite((*g)[i])) throw SpecError(std::string("non-finite value in grid ") + name);
    if (i > 0 && !((*g)[i] > (*g)[i - 1])) throw SpecError(std::string("grid ") + name + " must be strictly increasing");
  }
}

json grid_json(const std::optional<std::vector<double>>& g) { return g ? json(*g) : json(nullptr); }

}  // namespace

std::string library_version() { return SUBSPDE_VERSION; }

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto a = item.find_first_not_of(" \t");
    if (a == std::string::npos) continue;
    const auto b = item.find_last_not_of(" \t");
    const std::string tok = item.substr(a, b - a + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw SpecError("not a number in grid: '" + tok + "'");
    }
    if (used != tok.size()) throw SpecError("not a number in grid: '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

void ExperimentSpec::validate() const {
  check_grid(t, "t");
  check_grid(p, "p");
  check_grid(x, "x");
  check_grid(z, "z");
  check_grid(R, "R");
  if (preset) {
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), *preset) == names.end()) (void)scenario_preset(*preset);
  } else if (!coeff) {
    throw SpecError("either a preset or an inline coeff block is required");
  }
  if (p)
    for (double v : *p)
      if (v < 2.0) throw SpecError("moment orders p must be at least 2");
  if (t)
    for (double v : *t)
      if (!(v > 0.0)) throw SpecError("times must be positive");
}

Preset ExperimentSpec::resolve() const {
  Preset s;
  if (preset) {
    s = scenario_preset(*preset, preset_options);
  } else {
    s.name = "inline";
    s.description = "pipeline from the configuration file";
    s.regime = Regime::Auto;
    s.shape = nullptr;
  }
  if (equation) s.equation = *equation;
  if (coeff) s.coeff = *coeff;
  if (kernel) s.kernel = *kernel;
  if (init) s.init = *init;
  if (velocity) s.velocity = *velocity;
  if (regime) s.regime = *regime;
  if (frac) s.frac = *frac;
  s.constants = constants;
  if (!preset) s.simulable = s.equation != EquationKind::Fractional && s.kernel.dim() == 1;
  return s;
}

SimulationConfig ExperimentSpec::simulation(const std::vector<double>& times) const {
  const Preset s = resolve();
  SimulationConfig c = simulation_config(s, times, sim.paths.value_or(1000), seed);
  if (sim.L) c.L = *sim.L;
  if (sim.n) c.n = *sim.n;
  if (sim.dt) c.dt = *sim.dt;
  if (sim.scheme) c.scheme = *sim.scheme;
  if (sim.positivity_clip) c.positivity_clip = *sim.positivity_clip;
  if (sim.batches) c.batches = *sim.batches;
  if (p)
    for (double v : *p)
      if (std::find(c.moment_orders.begin(), c.moment_orders.end(), v) == c.moment_orders.end())
        c.moment_orders.push_back(v);
  if (z) c.tail_levels = *z;
  if (R) c.sup_radii = *R;
  c.threads = threads;
  return c;
}

ExperimentSpec parse_experiment(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("malformed configuration: ") + e.what());
  }
  reject_unknown(j,
                 {"preset", "preset_options", "equation", "coeff", "kernel", "init", "velocity", "regime",
                  "fractional", "constants", "grids", "simulation", "out", "seed", "threads"},
                 "configuration");
  ExperimentSpec s;
  s.preset = get_opt<std::string>(j, "preset", "configuration");
  if (j.contains("preset_options")) {
    const json& o = j["preset_options"];
    reject_unknown(o, {"alpha", "beta", "kappa", "b", "ell", "d"}, "preset_options");
    s.preset_options.alpha = get_opt<double>(o, "alpha", "preset_options");
    s.preset_options.beta = get_opt<double>(o, "beta", "preset_options");
    s.preset_options.kappa = get_opt<double>(o, "kappa", "preset_options");
    s.preset_options.b = get_opt<double>(o, "b", "preset_options");
    s.preset_options.ell = get_opt<double>(o, "ell", "preset_options");
    s.preset_options.d = get_opt<int>(o, "d", "preset_options");
  }
  if (j.contains("equation")) s.equation = equation_from_string(get<std::string>(j, "equation", "configuration"));
  if (j.contains("coeff")) s.coeff = coeff_from_json(j["coeff"]);
  if (j.contains("kernel")) s.kernel = kernel_from_json(j["kernel"]);
  if (j.contains("init")) s.init = init_from_json(j["init"], "init");
  if (j.contains("velocity")) s.velocity = init_from_json(j["velocity"], "velocity");
  if (j.contains("regime")) s.regime = regime_from_string(get<std::string>(j, "regime", "configuration"));
  if (j.contains("fractional")) {
    const json& f = j["fractional"];
    reject_unknown(f, {"a", "b", "gamma", "d"}, "fractional");
    FractionalParams fp;
    fp.a = get_opt<double>(f, "a", "fractional").value_or(fp.a);
    fp.b = get_opt<double>(f, "b", "fractional").value_or(fp.b);
    fp.gamma = get_opt<double>(f, "gamma", "fractional").value_or(fp.gamma);
    fp.d = get_opt<int>(f, "d", "fractional").value_or(fp.d);
    s.frac = fp;
  }
  if (j.contains("constants")) {
    const json& c = j["constants"];
    reject_unknown(c, {"C", "C_star", "K", "K1", "K2", "C0"}, "constants");
    s.constants.C = get_opt<double>(c, "C", "constants").value_or(1.0);
    s.constants.C_star = get_opt<double>(c, "C_star", "constants").value_or(1.0);
    s.constants.K = get_opt<double>(c, "K", "constants").value_or(1.0);
    s.constants.K1 = get_opt<double>(c, "K1", "constants").value_or(1.0);
    s.constants.K2 = get_opt<double>(c, "K2", "constants");
    s.constants.C0 = get_opt<double>(c, "C0", "constants").value_or(1.0);
  }
  if (j.contains("grids")) {
    const json& g = j["grids"];
    reject_unknown(g, {"t", "p", "x", "z", "R"}, "grids");
    s.t = get_opt<std::vector<double>>(g, "t", "grids");
    s.p = get_opt<std::vector<double>>(g, "p", "grids");
    s.x = get_opt<std::vector<double>>(g, "x", "grids");
    s.z = get_opt<std::vector<double>>(g, "z", "grids");
    s.R = get_opt<std::vector<double>>(g, "R", "grids");
  }
  if (j.contains("simulation")) {
    const json& m = j["simulation"];
    reject_unknown(m, {"L", "n", "dt", "paths", "scheme", "positivity_clip", "batches"}, "simulation");
    s.sim.L = get_opt<double>(m, "L", "simulation");
    s.sim.n = get_opt<std::size_t>(m, "n", "simulation");
    s.sim.dt = get_opt<double>(m, "dt", "simulation");
    s.sim.paths = get_opt<std::size_t>(m, "paths", "simulation");
    if (m.contains("scheme")) s.sim.scheme = heat_scheme_from_string(get<std::string>(m, "scheme", "simulation"));
    s.sim.positivity_clip = get_opt<bool>(m, "positivity_clip", "simulation");
    s.sim.batches = get_opt<std::size_t>(m, "batches", "simulation");
  }
  s.out_dir = get_opt<std::string>(j, "out", "configuration").value_or(".");
  s.seed = get_opt<std::uint64_t>(j, "seed", "configuration").value_or(1);
  s.threads = get_opt<unsigned>(j, "threads", "configuration").value_or(1);
  s.validate();
  return s;
}

ExperimentSpec load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open configuration file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment(ss.str());
}

namespace {

json spec_json(const ExperimentSpec& s) {
  json j;
  j["preset"] = s.preset ? json(*s.preset) : json(nullptr);
  json o = json::object();
  if (s.preset_options.alpha) o["alpha"] = *s.preset_options.alpha;
  if (s.preset_options.beta) o["beta"] = *s.preset_options.beta;
  if (s.preset_options.kappa) o["kappa"] = *s.preset_options.kappa;
  if (s.preset_options.b) o["b"] = *s.preset_options.b;
  if (s.preset_options.ell) o["ell"] = *s.preset_options.ell;
  if (s.preset_options.d) o["d"] = *s.preset_options.d;
  j["preset_options"] = o;
  // the resolved pipeline, so that the manifest does not depend on preset defaults
  const Preset p = s.resolve();
  j["equation"] = to_string(p.equation);
  j["coeff"] = coeff_to_json(p.coeff);
  j["kernel"] = kernel_to_json(p.kernel);
  j["init"] = init_to_json(p.init);
  j["velocity"] = init_to_json(p.velocity);
  j["regime"] = to_string(p.regime);
  j["fractional"] = {{"a", p.frac.a}, {"b", p.frac.b}, {"gamma", p.frac.gamma}, {"d", p.frac.d}};
  json c{{"C", s.constants.C}, {"C_star", s.constants.C_star}, {"K", s.constants.K}, {"K1", s.constants.K1},
         {"C0", s.constants.C0}};
  if (s.constants.K2) c["K2"] = *s.constants.K2;
  j["constants"] = c;
  j["grids"] = {{"t", grid_json(s.t)}, {"p", grid_json(s.p)}, {"x", grid_json(s.x)},
                {"z", grid_json(s.z)}, {"R", grid_json(s.R)}};
  j["out"] = s.out_dir;
  j["seed"] = s.seed;
  j["threads"] = s.threads;
  return j;
}

json sim_json(const SimulationConfig& c) {
  return json{{"equation", to_string(c.equation)},
              {"scheme", to_string(c.scheme)},
              {"L", c.L},
              {"n", c.n},
              {"dx", c.dx()},
              {"dt", c.step()},
              {"snapshot_times", c.snapshot_times},
              {"paths", c.paths},
              {"seed", c.seed},
              {"kernel", kernel_to_json(c.kernel)},
              {"coeff", coeff_to_json(c.coeff)},
              {"init", init_to_json(c.init)},
              {"velocity", init_to_json(c.velocity)},
              {"positivity_clip", c.positivity_clip},
              {"moment_orders", c.moment_orders},
              {"sup_radii", c.sup_radii},
              {"tail_levels", c.tail_levels},
              {"holder_lags", c.holder_lags},
              {"batches", c.batches}};
}

}  // namespace

std::string to_json(const ExperimentSpec& spec) { return spec_json(spec).dump(2); }

std::string to_json(const SimulationConfig& cfg) { return sim_json(cfg).dump(2); }

std::string manifest(const std::string& command, const ExperimentSpec& spec,
                     const std::optional<SimulationConfig>& sim) {
  json j;
  j["command"] = command;
  j["version"] = library_version();
  j["seed"] = spec.seed;
  j["experiment"] = spec_json(spec);
  if (sim) j["simulation"] = sim_json(*sim);
  // thread count changes nothing in the outputs and is left out on purpose
  j["experiment"].erase("threads");
  return j.dump(2);
}

}  // namespace subspde
