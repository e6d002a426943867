#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "subspde/presets.hpp"

namespace subspde {

// Simulation fields an experiment may override; unset fields keep the
// preset's (or the library's) defaults.
struct SimulationOverrides {
  std::optional<double> L;
  std::optional<std::size_t> n;
  std::optional<double> dt;
  std::optional<std::size_t> paths;
  std::optional<HeatScheme> scheme;
  std::optional<bool> positivity_clip;
  std::optional<std::size_t> batches;
};

struct ExperimentSpec {
  std::optional<std::string> preset;
  PresetOptions preset_options;
  // inline pipeline; each field replaces the preset's when both are given
  std::optional<EquationKind> equation;
  std::optional<DiffusionCoefficient> coeff;
  std::optional<CorrelationKernel> kernel;
  std::optional<InitialCondition> init;
  std::optional<InitialCondition> velocity;
  std::optional<Regime> regime;
  std::optional<FractionalParams> frac;
  BoundConstants constants;
  // grids; unset means the command's default, set-but-empty is an error
  std::optional<std::vector<double>> t, p, x, z, R;
  SimulationOverrides sim;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  unsigned threads = 1;

  // Throws SpecError ("empty grid", "... strictly increasing", unknown preset).
  void validate() const;
  // The preset with the inline fields applied, or a pipeline named "inline".
  Preset resolve() const;
  SimulationConfig simulation(const std::vector<double>& times) const;
};

// Parses the JSON configuration file format (see README). Unknown keys are
// rejected so that typos do not silently fall back to defaults.
ExperimentSpec parse_experiment(const std::string& json_text);
ExperimentSpec load_experiment(const std::string& path);

// Comma-separated number list, e.g. "1,2,4.5"; the empty string gives an
// empty list.
std::vector<double> parse_grid(const std::string& text);

std::string to_json(const ExperimentSpec& spec);
std::string to_json(const SimulationConfig& cfg);
// JSON manifest: command, library version, seed and the full configuration.
std::string manifest(const std::string& command, const ExperimentSpec& spec,
                     const std::optional<SimulationConfig>& sim = std::nullopt);

std::string library_version();

}  // namespace subspde
