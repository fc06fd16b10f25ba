#include "netcbf/runner.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <system_error>

#include "netcbf/analysis_bounds.hpp"
#include "netcbf/errors.hpp"
#include "netcbf/grid_case.hpp"
#include "netcbf/scenarios.hpp"

#ifndef NETCBF_VERSION
#define NETCBF_VERSION "0.0.0"
#endif

namespace netcbf {

using nlohmann::json;
namespace fs = std::filesystem;

std::string toolkit_version() { return NETCBF_VERSION; }

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int k = 0; k < len; ++k) {
    out.push_back(hex[digest[k] >> 4]);
    out.push_back(hex[digest[k] & 0xF]);
  }
  return out;
}

namespace {

struct Built {
  std::optional<grid::GridCase> grid;
  std::optional<Scenario> scenario;
};

Built build_scenario(const ExperimentConfig& cfg) {
  Built b;
  switch (cfg.scenario) {
    case ScenarioKind::ToyScalar:
      b.scenario = make_toy_scalar(cfg.toy);
      break;
    case ScenarioKind::CustomNetwork:
      b.scenario = make_custom_network(cfg.custom);
      break;
    case ScenarioKind::Ieee14:
      b.grid = grid::build_ieee14(cfg.grid);
      b.scenario = b.grid->scenario();
      break;
  }
  return b;
}

SimConfig sim_for(const ExperimentConfig& cfg, const Scenario& sc) {
  SimConfig sim = cfg.sim;
  sim.x0 = sc.x0;
  const Index n = sc.model.layout().state_dim();
  VectorXd& bias = sim.estimator.bias;
  if (bias.size() == 1 && n != 1) bias = VectorXd::Constant(n, bias(0));
  if (bias.size() != 0 && bias.size() != n) {
    throw ConfigError("filter.estimator.bias", 0,
                      "expected a scalar or " + std::to_string(n) + " entries, got " + std::to_string(bias.size()));
  }
  return sim;
}

Trajectory thin(const Trajectory& t, std::size_t stride) {
  if (stride <= 1) return t;
  Trajectory out;
  out.kind = t.kind;
  out.dt = t.dt * static_cast<double>(stride);
  out.error_sup = t.error_sup;
  out.warnings = t.warnings;
  for (std::size_t k = 0; k < t.size(); k += stride) {
    out.times.push_back(t.times[k]);
    out.states.push_back(t.states[k]);
    if (!t.fast.empty()) out.fast.push_back(t.fast[k]);
    if (!t.corrections.empty()) out.corrections.push_back(t.corrections[k]);
    if (!t.static_reference.empty()) out.static_reference.push_back(t.static_reference[k]);
    if (!t.active.empty()) out.active.push_back(t.active[k]);
    if (!t.error_norms.empty()) out.error_norms.push_back(t.error_norms[k]);
  }
  return out;
}

json estimator_json(const SimConfig& sim) {
  json e{{"kind", sim.estimator.kind == EstimatorKind::Exact ? "exact" : "dirty"}};
  if (sim.estimator.kind == EstimatorKind::Dirty) e["tau_d"] = sim.estimator.tau_d;
  if (sim.estimator.bias.size() != 0) e["bias_norm"] = vector_norm(sim.estimator.bias, sim.norm);
  return e;
}

json violation_json(const grid::ViolationSeries& v) {
  return {{"max_violation_hz", v.max_violation},
          {"max_time", v.max_time},
          {"support_duration", v.support_duration}};
}

std::string report_csv(const BoundReport& r) {
  std::ostringstream out;
  out << "t,empirical,bound";
  const bool with_active = !r.active_time.empty();
  if (with_active) out << ",active_time";
  out << '\n';
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    out << format_double(r.times[k]) << ',' << format_double(r.empirical[k]) << ',' << format_double(r.bound[k]);
    if (with_active) out << ',' << format_double(r.active_time[k]);
    out << '\n';
  }
  return out.str();
}

json report_json(const std::optional<BoundReport>& r) {
  if (!r) return nullptr;
  json j{{"satisfied", r->satisfied},
         {"verdict", r->satisfied ? "satisfied" : "violated"},
         {"min_slack", r->min_slack},
         {"median_slack", r->median_slack},
         {"samples", r->times.size()}};
  j["first_violation_time"] = r->first_violation_time ? json(*r->first_violation_time) : json(nullptr);
  if (!r->active_time.empty()) j["active_time_total"] = r->active_time.back();
  return j;
}

json verification_json(const std::string& scenario, const VerificationResult& v) {
  const ConstantEstimates& c = v.constants;
  json j;
  j["scenario"] = scenario;
  j["norm"] = to_string(c.norm);
  j["constants"] = {{"c_F", c.c_F},         {"c_F_p95", c.c_F_p95}, {"ell_s_x", c.ell_s_x},
                    {"ell_s_e", c.ell_s_e}, {"B_norm", c.B_norm},   {"N_bar", c.N_bar},
                    {"e_bar", c.e_bar},     {"epsilon", c.epsilon}, {"lambda", c.lambda()}};
  j["sampling"] = {{"seed", c.seed}, {"domain_samples", c.sample_count}, {"lipschitz_pairs", c.pair_count},
                   {"w_snapshot", "t = horizon"}, {"estimates", "sampled lower estimates, not certified"}};
  j["tracking"] = report_json(v.tracking);
  j["deviation"] = report_json(v.deviation);
  j["hypothesis_failures"] = v.hypothesis_failures;
  j["warnings"] = v.warnings;
  j["verdict"] = !v.hypothesis_failures.empty() ? "hypothesis-not-met" : v.all_satisfied() ? "satisfied" : "violated";
  return j;
}

const char* kFrequencyPlot = R"(#!/usr/bin/env python3
"""Bus frequency traces from frequency.csv (absolute Hz)."""
import csv
import sys
from pathlib import Path

import matplotlib.pyplot as plt

here = Path(__file__).resolve().parent
path = Path(sys.argv[1]) if len(sys.argv) > 1 else here / "frequency.csv"
with open(path, newline="") as fh:
    rows = list(csv.reader(fh))
header, data = rows[0], [[float(v) for v in r] for r in rows[1:]]
t = [r[0] for r in data]
fig, ax = plt.subplots(figsize=(7, 4))
for j, name in enumerate(header[1:], start=1):
    ax.plot(t, [r[j] for r in data], lw=1, label=name)
ax.axhline(NADIR, color="k", ls="--", lw=1)
ax.set_xlabel("t [s]")
ax.set_ylabel("frequency [Hz]")
ax.legend(ncol=4, fontsize=7)
fig.tight_layout()
fig.savefig(here / "frequency.png", dpi=150)
)";

const char* kHeatmapPlot = R"(#!/usr/bin/env python3
"""Max lower-bound frequency violation over (t, eps) from heatmap.csv."""
import csv
import sys
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

here = Path(__file__).resolve().parent
path = Path(sys.argv[1]) if len(sys.argv) > 1 else here / "heatmap.csv"
cells = {}
with open(path, newline="") as fh:
    for row in csv.DictReader(fh):
        cells.setdefault(float(row["eps"]), []).append((float(row["t"]), float(row["violation_hz"])))
eps = sorted(cells)
t = [p[0] for p in cells[eps[0]]]
v = np.array([[p[1] for p in cells[e]] for e in eps])
fig, ax = plt.subplots(figsize=(7, 4))
mesh = ax.pcolormesh(t, eps, v, shading="auto", cmap="viridis")
ax.set_yscale("log")
ax.set_xlabel("t [s]")
ax.set_ylabel("epsilon")
fig.colorbar(mesh, ax=ax, label="violation [Hz]")
fig.tight_layout()
fig.savefig(here / "heatmap.png", dpi=150)
)";

std::string frequency_plot(double nadir) {
  std::string s = kFrequencyPlot;
  s.replace(s.find("NADIR"), 5, format_double(nadir));
  return s;
}

void add(RunOutcome& out, std::string name, std::string content) {
  out.artifacts.push_back({std::move(name), std::move(content)});
}

void add_verification(RunOutcome& out, const ExperimentConfig& cfg, const Scenario& sc, const SimConfig& base,
                      json& verdicts, bool& hypothesis_failed, bool& violated) {
  for (const Norm norm : cfg.analysis.norms) {
    VerifySettings vs;
    vs.sim = base;
    vs.sim.norm = norm;
    vs.samples = cfg.analysis.samples;
    vs.lipschitz.pairs = cfg.analysis.pairs;
    vs.seed = *cfg.analysis.seed;
    const VerificationResult v = verify_bounds(sc, vs);
    const std::string tag = "bounds_" + std::string(to_string(norm));
    const json j = verification_json(sc.name, v);
    add(out, tag + ".json", j.dump(2) + "\n");
    if (v.tracking) add(out, tag + "_tracking.csv", report_csv(*v.tracking));
    if (v.deviation) add(out, tag + "_deviation.csv", report_csv(*v.deviation));
    verdicts[tag] = j["verdict"];
    if (!v.hypothesis_failures.empty()) {
      hypothesis_failed = true;
      for (const auto& f : v.hypothesis_failures) out.messages.push_back(std::string(to_string(norm)) + "-norm " + f);
    }
    if ((v.tracking && !v.tracking->satisfied) || (v.deviation && !v.deviation->satisfied)) violated = true;
  }
}

void do_run(RunOutcome& out, const ExperimentConfig& cfg, const Built& b) {
  const Scenario& sc = *b.scenario;
  const SimConfig sim = sim_for(cfg, sc);
  if (cfg.analysis.enabled && cfg.filter != FilterKind::Dynamic) {
    throw ConfigError("analysis.enabled", 0, "bound analysis needs filter.kind = dynamic");
  }
  Trajectory traj;
  switch (cfg.filter) {
    case FilterKind::None:
      traj = simulate_nominal(sc.model, sc.disturbance, sim);
      break;
    case FilterKind::Static:
      traj = simulate_static(sc.model, sc.spec, sc.disturbance, sim);
      break;
    case FilterKind::Dynamic:
      traj = simulate_dynamic(sc.model, sc.spec, sc.disturbance, sim);
      break;
  }
  const Trajectory shown = thin(traj, cfg.csv_stride);
  add(out, "trajectory.csv", trajectory_csv(shown));

  json summary{{"scenario", to_string(cfg.scenario)},
               {"filter", to_string(cfg.filter)},
               {"dt", sim.dt},
               {"horizon", sim.horizon},
               {"samples", traj.size()},
               {"warnings", traj.warnings}};
  if (cfg.filter == FilterKind::Dynamic) {
    summary["epsilon"] = sim.epsilon;
    summary["estimator"] = estimator_json(sim);
    summary["estimate_error_sup"] = traj.error_sup;
  }
  if (b.grid) {
    const auto v = grid::violation_metric(traj, *b.grid);
    summary["violation"] = violation_json(v);
    out.verdicts["max_violation_hz"] = v.max_violation;
    add(out, "frequency.csv", grid::frequency_csv(traj, *b.grid, cfg.csv_stride));
    add(out, "plot_frequency.py", frequency_plot(b.grid->params.nadir_hz));
  }
  for (const auto& w : traj.warnings) out.messages.push_back("warning: " + w);

  bool hypothesis_failed = false;
  bool violated = false;
  if (cfg.analysis.enabled) {
    add_verification(out, cfg, sc, sim, out.verdicts, hypothesis_failed, violated);
    summary["bounds"] = out.verdicts;
  }
  add(out, "summary.json", summary.dump(2) + "\n");
  out.exit_code = hypothesis_failed ? exit_code::kHypothesisNotMet : exit_code::kOk;
}

void do_verify(RunOutcome& out, const ExperimentConfig& cfg, const Built& b) {
  if (!cfg.analysis.seed) throw ConfigError("analysis.seed", 0, "verify needs a seed (config or --seed)");
  if (cfg.filter != FilterKind::Dynamic) throw ConfigError("filter.kind", 0, "verify needs the dynamic filter");
  const SimConfig sim = sim_for(cfg, *b.scenario);
  bool hypothesis_failed = false;
  bool violated = false;
  add_verification(out, cfg, *b.scenario, sim, out.verdicts, hypothesis_failed, violated);
  const char* overall = hypothesis_failed ? "hypothesis-not-met" : violated ? "violated" : "satisfied";
  json verdict{{"scenario", b.scenario->name},
               {"epsilon", sim.epsilon},
               {"estimator", estimator_json(sim)},
               {"verdict", overall},
               {"per_norm", out.verdicts},
               {"details", out.messages}};
  add(out, "verdict.json", verdict.dump(2) + "\n");
  out.verdicts["overall"] = overall;
  out.exit_code = hypothesis_failed ? exit_code::kHypothesisNotMet
                  : violated        ? exit_code::kBoundViolated
                                    : exit_code::kOk;
}

void do_sweep(RunOutcome& out, const ExperimentConfig& cfg, const Built& b, std::size_t jobs) {
  if (!cfg.sweep) throw ConfigError("sweep", 0, "sweep section required");
  if (!b.grid) throw ConfigError("scenario.kind", 0, "sweep is defined for the ieee14 scenario");
  if (cfg.filter != FilterKind::Dynamic) throw ConfigError("filter.kind", 0, "sweep needs the dynamic filter");
  const SimConfig base = sim_for(cfg, *b.scenario);
  const auto eps = grid::log_spaced(cfg.sweep->eps_min, cfg.sweep->eps_max, cfg.sweep->count);
  const grid::SweepResult res = grid::epsilon_sweep(*b.grid, eps, base, jobs);

  json cells = json::array();
  for (const auto& c : res.cells) {
    json j{{"epsilon", c.epsilon}, {"ok", c.ok}};
    if (c.ok) {
      j.update(violation_json(c.violation));
    } else {
      j["error"] = c.error;
      out.messages.push_back("cell eps=" + format_double(c.epsilon) + ": " + c.error);
    }
    cells.push_back(j);
  }
  json summary{{"scenario", to_string(cfg.scenario)},
               {"estimator", estimator_json(base)},
               {"dt", base.dt},
               {"horizon", base.horizon},
               {"cells", cells},
               {"succeeded", res.succeeded()}};

  // Ordinal checks between the smallest and largest successful epsilon.
  const grid::SweepCell* lo = nullptr;
  const grid::SweepCell* hi = nullptr;
  bool any_zero = false;
  for (const auto& c : res.cells) {
    if (!c.ok) continue;
    if (!lo || c.epsilon < lo->epsilon) lo = &c;
    if (!hi || c.epsilon > hi->epsilon) hi = &c;
    any_zero = any_zero || c.violation.max_violation == 0.0;
  }
  if (lo && hi && lo != hi) {
    out.verdicts["violation_decreases"] = hi->violation.max_violation > lo->violation.max_violation;
    out.verdicts["support_shrinks"] = lo->violation.support_duration < hi->violation.support_duration;
  }
  out.verdicts["zero_violation_cell"] = any_zero;
  out.verdicts["cells_succeeded"] = res.succeeded();
  summary["checks"] = out.verdicts;

  add(out, "heatmap.csv", grid::heatmap_csv(res, cfg.heatmap_stride));
  add(out, "plot_heatmap.py", kHeatmapPlot);
  add(out, "sweep.json", summary.dump(2) + "\n");
  out.exit_code = res.succeeded() > 0 ? exit_code::kOk : exit_code::kNumerical;
}

const char* command_name(Command c) {
  switch (c) {
    case Command::Run:
      return "run";
    case Command::Sweep:
      return "sweep";
    case Command::Verify:
      return "verify";
  }
  return "?";
}

void fail(RunOutcome& out, int code, const std::string& message) {
  out.artifacts.clear();
  out.exit_code = code;
  out.messages.push_back(message);
}

}  // namespace

RunOutcome execute(Command command, const ExperimentConfig& cfg, const RunnerOptions& options) {
  RunOutcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    const Built b = build_scenario(cfg);
    switch (command) {
      case Command::Run:
        do_run(out, cfg, b);
        break;
      case Command::Verify:
        do_verify(out, cfg, b);
        break;
      case Command::Sweep:
        do_sweep(out, cfg, b, std::max<std::size_t>(1, options.jobs));
        break;
    }
  } catch (const ConfigError& e) {
    fail(out, exit_code::kConfig, std::string("config error: ") + e.what());
  } catch (const HypothesisNotMet& e) {
    fail(out, exit_code::kHypothesisNotMet, std::string("hypothesis not met: ") + e.what());
  } catch (const WellPosednessViolation& e) {
    fail(out, exit_code::kHypothesisNotMet, std::string("well-posedness violated: ") + e.what());
  } catch (const NumericalBlowup& e) {
    fail(out, exit_code::kNumerical, std::string("numerical blowup: ") + e.what());
  } catch (const DomainExit& e) {
    fail(out, exit_code::kNumerical, std::string("domain exit: ") + e.what());
  } catch (const NumericalError& e) {
    fail(out, exit_code::kNumerical, std::string("numerical error: ") + e.what());
  } catch (const std::invalid_argument& e) {
    fail(out, exit_code::kConfig, std::string("invalid model: ") + e.what());
  } catch (const std::exception& e) {
    fail(out, exit_code::kConfig, std::string("error: ") + e.what());
  }
  if (out.artifacts.empty()) return out;

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json files = json::array();
  for (const auto& a : out.artifacts) {
    files.push_back({{"name", a.name}, {"bytes", a.content.size()}, {"sha256", sha256_hex(a.content)}});
  }
  json manifest{{"toolkit", "netcbf"},
                {"version", toolkit_version()},
                {"command", command_name(command)},
                {"config_sha256", sha256_hex(cfg.canonical.dump())},
                {"config", cfg.canonical},
                {"files", files},
                {"wall_clock_seconds", wall},
                {"exit_code", out.exit_code},
                {"verdicts", out.verdicts},
                {"messages", out.messages}};
  add(out, "manifest.json", manifest.dump(2) + "\n");
  return out;
}

void write_outputs(const RunOutcome& outcome, const fs::path& dir) {
  if (outcome.artifacts.empty()) return;
  const fs::path target = fs::absolute(dir).lexically_normal();
  if (fs::exists(target)) {
    if (!fs::is_directory(target)) throw std::runtime_error(target.string() + " exists and is not a directory");
    if (!fs::is_empty(target) && !fs::exists(target / "manifest.json")) {
      throw std::runtime_error(target.string() + " is not empty and holds no previous manifest; refusing to replace");
    }
  }
  if (target.has_parent_path()) fs::create_directories(target.parent_path());

  std::random_device rd;
  fs::path stage;
  do {
    stage = target.parent_path() / (target.filename().string() + ".staging-" + std::to_string(rd()));
  } while (fs::exists(stage));
  fs::create_directory(stage);
  try {
    for (const auto& a : outcome.artifacts) {
      std::ofstream f(stage / a.name, std::ios::binary);
      f.write(a.content.data(), static_cast<std::streamsize>(a.content.size()));
      if (!f) throw std::runtime_error("failed writing " + (stage / a.name).string());
    }
    if (fs::exists(target)) fs::remove_all(target);
    fs::rename(stage, target);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(stage, ec);
    throw;
  }
}

}  // namespace netcbf
