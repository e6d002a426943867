#include <cmath>
#include <numbers>

#include "doctest.h"
#include "subspde/config.hpp"
#include "subspde/errors.hpp"
#include "subspde/presets.hpp"

using namespace subspde;

TEST_CASE("every preset recovers its exponent from the bound") {
  for (const auto& name : preset_names()) {
    const auto p = scenario_preset(name);
    const auto ex = preset_exponent(p);
    INFO(name, " fitted ", ex.fitted, " predicted ", ex.predicted, " nominal ", ex.nominal);
    CHECK(std::isfinite(ex.fitted));
    CHECK(std::abs(ex.fitted - ex.predicted) <= 0.05);
  }
}

TEST_CASE("power-law exponents match the nominal values") {
  for (const char* name : {"alpha-white", "alpha-riesz-d1", "alpha-riesz-dn", "alpha-powerlaw-init", "alpha-exp-init",
                           "log-case-iii", "frac-alpha", "wave-alpha"}) {
    const auto ex = preset_exponent(scenario_preset(name));
    INFO(name);
    CHECK(ex.fitted == doctest::Approx(ex.nominal).epsilon(1e-3));
  }
}

TEST_CASE("preset options change the parameters") {
  PresetOptions o;
  o.alpha = 0.75;
  const auto p = scenario_preset("alpha-white", o);
  CHECK(p.coeff.params().alpha == 0.75);
  CHECK(preset_exponent(p).fitted == doctest::Approx(2.0).epsilon(1e-6));
  CHECK_THROWS_AS(scenario_preset("no-such-preset"), SpecError);
}

TEST_CASE("bounded-rho preset at t = pi") {
  const auto rep = evaluate(scenario_preset("bounded-rho"), std::numbers::pi, 2.0);
  CHECK(rep.total == doctest::Approx(18.0).epsilon(1e-12));
}

TEST_CASE("simulation setup of a preset") {
  const auto cfg = simulation_config(scenario_preset("alpha-white"), {1.0, 16.0}, 100, 5);
  CHECK(cfg.dx() == doctest::Approx(0.05));
  CHECK(cfg.L >= 5.0 * 4.0);
  CHECK(cfg.n % 64 == 0);
  CHECK_THROWS_AS(simulation_config(scenario_preset("frac-alpha"), {1.0}, 10, 1), UnsupportedError);
}

TEST_CASE("growth regressions") {
  const auto t = log_grid(10.0, 1e4, 12);
  std::vector<double> pw, st, ex;
  for (double s : t) {
    pw.push_back(3.0 * std::pow(s, 0.7));
    st.push_back(std::exp(2.0 * std::pow(s, 0.3)));
    ex.push_back(std::exp(0.01 * s));
  }
  CHECK(growth_exponent(GrowthKind::Power, t, pw) == doctest::Approx(0.7));
  CHECK(growth_exponent(GrowthKind::Stretched, t, st) == doctest::Approx(0.3));
  CHECK(growth_exponent(GrowthKind::Exponential, t, ex) == doctest::Approx(0.01));
  const auto g = log_grid(1.0, 100.0, 3);
  CHECK(g[1] == doctest::Approx(10.0));
}

TEST_CASE("experiment files") {
  const auto spec = parse_experiment(R"({
    "preset": "alpha-white",
    "grids": {"t": [1, 2, 4], "p": [2, 3]},
    "simulation": {"paths": 50, "n": 128, "scheme": "spectral"},
    "seed": 17
  })");
  CHECK(spec.preset == std::optional<std::string>("alpha-white"));
  REQUIRE(spec.t.has_value());
  CHECK(spec.t->size() == 3);
  CHECK(spec.seed == 17);
  const auto sim = spec.simulation({1.0, 2.0});
  CHECK(sim.paths == 50);
  CHECK(sim.n == 128);
  CHECK(sim.scheme == HeatScheme::Spectral);
  CHECK(sim.seed == 17);

  CHECK_THROWS_AS(parse_experiment(R"({"preset": "alpha-white", "grids": {"t": []}})").validate(), SpecError);
  CHECK_THROWS_AS(parse_experiment(R"({"preset": "alpha-white", "grids": {"t": [2, 1]}})").validate(), SpecError);
  CHECK_THROWS_AS(parse_experiment(R"({"preset": "alpha-white", "colour": 1})"), SpecError);
  CHECK_THROWS_AS(parse_experiment("{not json"), SpecError);
}

TEST_CASE("inline pipelines") {
  const auto spec = parse_experiment(R"({
    "coeff": {"family": "log-perturbed", "alpha": 1, "beta": 2},
    "kernel": {"variant": "riesz", "alpha": 0.5, "d": 1},
    "init": {"variant": "constant", "c": 2}
  })");
  const auto p = spec.resolve();
  CHECK(p.coeff.family() == Family::LogPerturbed);
  CHECK(p.kernel.variant() == KernelVariant::Riesz);
  CHECK(p.init.param() == 2.0);
}

TEST_CASE("config round trip and grids") {
  const auto spec = parse_experiment(R"({"preset": "vsv", "grids": {"t": [1, 10]}, "constants": {"C_star": 2}})");
  const auto again = parse_experiment(to_json(spec));
  CHECK(again.preset == spec.preset);
  CHECK(*again.t == *spec.t);
  CHECK(again.constants.C_star == 2.0);
  CHECK(parse_grid("1,2.5,4") == std::vector<double>{1.0, 2.5, 4.0});
  CHECK(parse_grid("").empty());
  CHECK_THROWS_AS(parse_grid("1,x"), SpecError);
  CHECK(manifest("bound", spec).find(library_version()) != std::string::npos);
}
