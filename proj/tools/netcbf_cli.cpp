// netcbf: run, sweep and verify safety-filter experiments from JSON configs.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "netcbf/config.hpp"
#include "netcbf/runner.hpp"

namespace {

struct Source {
  std::string config_path;
  std::string preset_name;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
};

void add_common(CLI::App* cmd, Source& src, bool with_jobs) {
  auto* cfg = cmd->add_option("--config", src.config_path, "Experiment config (JSON)")->check(CLI::ExistingFile);
  auto* pre = cmd->add_option("--preset", src.preset_name, "Built-in preset (see `presets`)");
  cfg->excludes(pre);
  cmd->add_option("--out", src.out_dir, "Output directory (overrides output.dir)");
  cmd->add_option("--seed", src.seed, "Analysis seed (overrides analysis.seed)");
  if (with_jobs) cmd->add_option("--jobs", src.jobs, "Parallel sweep jobs")->check(CLI::PositiveNumber);
}

netcbf::ExperimentConfig resolve(const Source& src) {
  if (src.config_path.empty() && src.preset_name.empty()) {
    throw netcbf::ConfigError("", 0, "one of --config or --preset is required");
  }
  netcbf::ExperimentConfig cfg = src.config_path.empty() ? netcbf::config_from_json(netcbf::preset(src.preset_name))
                                                         : netcbf::load_config(src.config_path);
  if (!src.out_dir.empty() || src.seed) {
    nlohmann::json doc = cfg.canonical;
    if (!src.out_dir.empty()) doc["output"]["dir"] = src.out_dir;
    if (src.seed) doc["analysis"]["seed"] = *src.seed;
    cfg = netcbf::config_from_json(doc);
  }
  return cfg;
}

int dispatch(netcbf::Command command, const Source& src) {
  netcbf::ExperimentConfig cfg;
  try {
    cfg = resolve(src);
  } catch (const netcbf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return netcbf::exit_code::kConfig;
  }
  const netcbf::RunOutcome out = netcbf::execute(command, cfg, {src.jobs});
  for (const auto& m : out.messages) std::cerr << m << '\n';
  try {
    netcbf::write_outputs(out, cfg.output_dir);
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << '\n';
    return netcbf::exit_code::kConfig;
  }
  if (!out.artifacts.empty()) {
    std::cout << "wrote " << out.artifacts.size() << " files to " << cfg.output_dir << '\n';
    for (const auto& [key, value] : out.verdicts.items()) std::cout << "  " << key << ": " << value.dump() << '\n';
  }
  return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-form and two-time-scale CBF safety filters for networked systems"};
  app.set_version_flag("--version", netcbf::toolkit_version());
  app.require_subcommand(1);

  Source run_src, sweep_src, verify_src;
  auto* run = app.add_subcommand("run", "Simulate one configuration and write trajectory CSVs");
  add_common(run, run_src, false);
  auto* sweep = app.add_subcommand("sweep", "Epsilon sweep; writes heatmap.csv and a plot script");
  add_common(sweep, sweep_src, true);
  auto* verify = app.add_subcommand("verify", "Check the tracking and deviation bounds");
  add_common(verify, verify_src, false);

  std::string show;
  auto* presets = app.add_subcommand("presets", "List built-in presets, or print one with --show");
  presets->add_option("--show", show, "Print the named preset as JSON");

  CLI11_PARSE(app, argc, argv);

  if (*run) return dispatch(netcbf::Command::Run, run_src);
  if (*sweep) return dispatch(netcbf::Command::Sweep, sweep_src);
  if (*verify) return dispatch(netcbf::Command::Verify, verify_src);
  if (show.empty()) {
    for (const auto& name : netcbf::preset_names()) std::cout << name << '\n';
    return 0;
  }
  try {
    std::cout << netcbf::preset(show).dump(2) << '\n';
  } catch (const netcbf::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return netcbf::exit_code::kConfig;
  }
  return 0;
}
