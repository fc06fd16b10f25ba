#pragma once

// Experiment configuration: a JSON document validated against a closed schema
// (unknown keys are errors). See config/schema.json for the reference layout.

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "netcbf/grid_case.hpp"
#include "netcbf/scenarios.hpp"
#include "netcbf/sim_engine.hpp"

namespace netcbf {

/// Parse or schema error, with the offending field path and (when known) source line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, int line, const std::string& message);
  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  std::string field_;
  int line_;
};

enum class ScenarioKind { ToyScalar, CustomNetwork, Ieee14 };
enum class FilterKind { None, Static, Dynamic };

struct AnalysisConfig {
  bool enabled = false;
  std::vector<Norm> norms{Norm::Two};
  std::size_t samples = 500;
  std::size_t pairs = 10000;
  std::optional<std::uint64_t> seed;
};

struct SweepConfig {
  double eps_min = 1e-2;
  double eps_max = 1.0;
  std::size_t count = 12;
};

struct ExperimentConfig {
  ScenarioKind scenario = ScenarioKind::Ieee14;
  ToyScalarOptions toy;
  CustomNetworkOptions custom;
  grid::GridOptions grid;
  FilterKind filter = FilterKind::Dynamic;
  SimConfig sim;  // x0 comes from the scenario
  AnalysisConfig analysis;
  std::optional<SweepConfig> sweep;
  std::string output_dir = "out";
  std::size_t csv_stride = 1;
  std::size_t heatmap_stride = 10;

  /// Fully defaulted, validated document; hashed into the run manifest.
  nlohmann::json canonical;
};

/// Parses and validates; `origin` names the source in diagnostics.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Builds from an already-parsed document (presets, overrides).
ExperimentConfig config_from_json(const nlohmann::json& doc);

std::vector<std::string> preset_names();
/// Throws ConfigError for unknown names.
nlohmann::json preset(const std::string& name);

std::string to_string(ScenarioKind kind);
std::string to_string(FilterKind kind);

}  // namespace netcbf
