#include "netcbf/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <utility>

namespace netcbf {

using nlohmann::json;

ConfigError::ConfigError(std::string field, int line, const std::string& message)
    : std::runtime_error([&] {
        std::string where = field.empty() ? std::string() : field;
        if (line > 0) where += (where.empty() ? "" : " ") + std::string("(line ") + std::to_string(line) + ")";
        return where.empty() ? message : where + ": " + message;
      }()),
      field_(std::move(field)),
      line_(line) {}

namespace {

// Tracks the source text so field errors can point at a line.
struct Ctx {
  const std::string* text = nullptr;

  int line_of(const std::string& path) const {
    if (text == nullptr || path.empty()) return 0;
    std::size_t pos = 0;
    std::size_t start = 0;
    while (start < path.size()) {
      std::size_t dot = path.find('.', start);
      std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      start = dot == std::string::npos ? path.size() : dot + 1;
      if (auto br = key.find('['); br != std::string::npos) key.resize(br);
      if (key.empty()) continue;
      const std::size_t hit = text->find("\"" + key + "\"", pos);
      if (hit == std::string::npos) break;
      pos = hit;
    }
    if (pos == 0 && text->find('"' + path + '"') == std::string::npos) return 0;
    return 1 + static_cast<int>(std::count(text->begin(), text->begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
  }

  [[noreturn]] void fail(const std::string& path, const std::string& message) const {
    throw ConfigError(path, line_of(path), message);
  }
};

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void require_object(const Ctx& ctx, const json& j, const std::string& path) {
  if (!j.is_object()) ctx.fail(path.empty() ? "<root>" : path, "expected an object");
}

void check_keys(const Ctx& ctx, const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  require_object(ctx, obj, path);
  for (const auto& [key, value] : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!known) ctx.fail(join(path, key), "unknown key");
  }
}

double number(const Ctx& ctx, const json& obj, const std::string& path, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) ctx.fail(join(path, key), "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) ctx.fail(join(path, key), "must be finite");
  return d;
}

double positive(const Ctx& ctx, const json& obj, const std::string& path, const char* key, double fallback) {
  const double d = number(ctx, obj, path, key, fallback);
  if (!(d > 0.0)) ctx.fail(join(path, key), "must be positive");
  return d;
}

std::size_t count(const Ctx& ctx, const json& obj, const std::string& path, const char* key, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() <= 0) ctx.fail(join(path, key), "expected a positive integer");
  return static_cast<std::size_t>(v.get<std::int64_t>());
}

int integer(const Ctx& ctx, const json& obj, const std::string& path, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) ctx.fail(join(path, key), "expected an integer");
  return v.get<int>();
}

bool boolean(const Ctx& ctx, const json& obj, const std::string& path, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) ctx.fail(join(path, key), "expected true or false");
  return v.get<bool>();
}

std::string choice(const Ctx& ctx, const json& obj, const std::string& path, const char* key, std::string fallback,
                   std::initializer_list<const char*> options) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  std::string allowed;
  for (const char* o : options) allowed += (allowed.empty() ? "" : ", ") + std::string(o);
  if (!v.is_string()) ctx.fail(join(path, key), "expected one of: " + allowed);
  const std::string s = v.get<std::string>();
  if (std::none_of(options.begin(), options.end(), [&](const char* o) { return s == o; })) {
    ctx.fail(join(path, key), "'" + s + "' is not one of: " + allowed);
  }
  return s;
}

VectorXd vector_of(const Ctx& ctx, const json& v, const std::string& path) {
  if (!v.is_array()) ctx.fail(path, "expected an array of numbers");
  VectorXd out(static_cast<Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!v[k].is_number()) ctx.fail(path + "[" + std::to_string(k) + "]", "expected a number");
    out(static_cast<Index>(k)) = v[k].get<double>();
  }
  return out;
}

MatrixXd matrix_of(const Ctx& ctx, const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) ctx.fail(path, "expected a non-empty array of rows");
  const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
  MatrixXd out(static_cast<Index>(v.size()), static_cast<Index>(cols));
  for (std::size_t r = 0; r < v.size(); ++r) {
    const std::string row_path = path + "[" + std::to_string(r) + "]";
    const VectorXd row = vector_of(ctx, v[r], row_path);
    if (static_cast<std::size_t>(row.size()) != cols) ctx.fail(row_path, "rows must have equal length");
    out.row(static_cast<Index>(r)) = row.transpose();
  }
  return out;
}

std::vector<Index> dims_of(const Ctx& ctx, const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) ctx.fail(path, "expected a non-empty array of positive integers");
  std::vector<Index> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!v[k].is_number_integer() || v[k].get<std::int64_t>() <= 0) {
      ctx.fail(path + "[" + std::to_string(k) + "]", "expected a positive integer");
    }
    out.push_back(static_cast<Index>(v[k].get<std::int64_t>()));
  }
  return out;
}

const json& section(const Ctx& ctx, const json& obj, const std::string& path, const char* key) {
  static const json empty = json::object();
  if (!obj.contains(key)) return empty;
  require_object(ctx, obj.at(key), join(path, key));
  return obj.at(key);
}

void parse_toy(const Ctx& ctx, const json& j, const std::string& p, ToyScalarOptions& o) {
  check_keys(ctx, j, p, {"decay", "offset", "alpha", "disturbance", "onset", "x0", "box_half_width"});
  o.decay = number(ctx, j, p, "decay", o.decay);
  o.offset = number(ctx, j, p, "offset", o.offset);
  o.alpha = positive(ctx, j, p, "alpha", o.alpha);
  o.disturbance = number(ctx, j, p, "disturbance", o.disturbance);
  o.onset = number(ctx, j, p, "onset", o.onset);
  o.x0 = number(ctx, j, p, "x0", o.x0);
  o.box_half_width = positive(ctx, j, p, "box_half_width", o.box_half_width);
}

void parse_custom(const Ctx& ctx, const json& j, const std::string& p, CustomNetworkOptions& o) {
  check_keys(ctx, j, p,
             {"state_dims", "input_dims", "coupling", "drift", "input_blocks", "gains", "barriers", "disturbance",
              "onset", "x0", "domain"});
  for (const char* required : {"state_dims", "input_dims", "coupling", "input_blocks", "barriers", "x0", "domain"}) {
    if (!j.contains(required)) ctx.fail(join(p, required), "required for custom-network");
  }
  o.state_dims = dims_of(ctx, j.at("state_dims"), join(p, "state_dims"));
  o.input_dims = dims_of(ctx, j.at("input_dims"), join(p, "input_dims"));
  if (o.state_dims.size() != o.input_dims.size()) ctx.fail(join(p, "input_dims"), "length must match state_dims");
  o.coupling = matrix_of(ctx, j.at("coupling"), join(p, "coupling"));
  if (j.contains("drift")) o.drift = vector_of(ctx, j.at("drift"), join(p, "drift"));

  const json& blocks = j.at("input_blocks");
  if (!blocks.is_array() || blocks.size() != o.state_dims.size()) {
    ctx.fail(join(p, "input_blocks"), "expected one matrix per subsystem");
  }
  o.input_blocks.clear();
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    o.input_blocks.push_back(matrix_of(ctx, blocks[i], join(p, "input_blocks") + "[" + std::to_string(i) + "]"));
  }
  o.gains.clear();
  if (j.contains("gains")) {
    const json& gains = j.at("gains");
    if (!gains.is_array() || gains.size() != o.state_dims.size()) {
      ctx.fail(join(p, "gains"), "expected one matrix per subsystem");
    }
    for (std::size_t i = 0; i < gains.size(); ++i) {
      o.gains.push_back(matrix_of(ctx, gains[i], join(p, "gains") + "[" + std::to_string(i) + "]"));
    }
  }

  const json& barriers = j.at("barriers");
  if (!barriers.is_array() || barriers.size() != o.state_dims.size()) {
    ctx.fail(join(p, "barriers"), "expected one entry (object or null) per subsystem");
  }
  o.barriers.clear();
  for (std::size_t i = 0; i < barriers.size(); ++i) {
    const std::string bp = join(p, "barriers") + "[" + std::to_string(i) + "]";
    if (barriers[i].is_null()) {
      o.barriers.emplace_back(std::nullopt);
      continue;
    }
    check_keys(ctx, barriers[i], bp, {"normal", "offset", "alpha"});
    if (!barriers[i].contains("normal")) ctx.fail(join(bp, "normal"), "required");
    AffineBarrierOptions b;
    b.normal = vector_of(ctx, barriers[i].at("normal"), join(bp, "normal"));
    b.offset = number(ctx, barriers[i], bp, "offset", 0.0);
    b.alpha = positive(ctx, barriers[i], bp, "alpha", 1.0);
    o.barriers.emplace_back(std::move(b));
  }

  if (j.contains("disturbance")) o.disturbance = vector_of(ctx, j.at("disturbance"), join(p, "disturbance"));
  o.onset = number(ctx, j, p, "onset", 0.0);
  o.x0 = vector_of(ctx, j.at("x0"), join(p, "x0"));

  const std::string dp = join(p, "domain");
  const json& dom = j.at("domain");
  check_keys(ctx, dom, dp, {"lower", "upper"});
  if (!dom.contains("lower") || !dom.contains("upper")) ctx.fail(dp, "needs lower and upper");
  o.domain.lower = vector_of(ctx, dom.at("lower"), join(dp, "lower"));
  o.domain.upper = vector_of(ctx, dom.at("upper"), join(dp, "upper"));
  if (o.domain.lower.size() != o.domain.upper.size() || (o.domain.upper.array() <= o.domain.lower.array()).any()) {
    ctx.fail(dp, "lower must be strictly below upper, componentwise");
  }
}

void parse_grid(const Ctx& ctx, const json& j, const std::string& p, grid::GridOptions& o) {
  check_keys(ctx, j, p, {"data_dir", "generators", "filter_buses", "alpha", "nadir_hz", "disturbance", "domain"});
  if (j.contains("data_dir")) {
    if (!j.at("data_dir").is_string()) ctx.fail(join(p, "data_dir"), "expected a path string");
    o.data_dir = j.at("data_dir").get<std::string>();
  }
  if (j.contains("generators")) {
    const auto dims = dims_of(ctx, j.at("generators"), join(p, "generators"));
    o.generators.assign(dims.begin(), dims.end());
  }
  o.filter_buses = choice(ctx, j, p, "filter_buses", "all", {"all", "inverters"}) == "all" ? grid::FilterBuses::All
                                                                                          : grid::FilterBuses::Inverters;
  o.alpha = positive(ctx, j, p, "alpha", o.alpha);
  o.nadir_hz = number(ctx, j, p, "nadir_hz", o.nadir_hz);

  const std::string dp = join(p, "disturbance");
  const json& d = section(ctx, j, p, "disturbance");
  check_keys(ctx, d, dp, {"magnitude", "bus", "onset", "units"});
  o.disturbance_magnitude = number(ctx, d, dp, "magnitude", o.disturbance_magnitude);
  o.disturbance_bus = integer(ctx, d, dp, "bus", o.disturbance_bus);
  o.disturbance_onset = number(ctx, d, dp, "onset", o.disturbance_onset);
  o.disturbance_units = choice(ctx, d, dp, "units", "state_derivative", {"state_derivative", "power"}) == "power"
                            ? grid::DisturbanceUnits::Power
                            : grid::DisturbanceUnits::StateDerivative;

  const std::string bp = join(p, "domain");
  const json& b = section(ctx, j, p, "domain");
  check_keys(ctx, b, bp, {"theta", "omega", "pm"});
  o.theta_bound = positive(ctx, b, bp, "theta", o.theta_bound);
  o.omega_bound = positive(ctx, b, bp, "omega", o.omega_bound);
  o.pm_bound = positive(ctx, b, bp, "pm", o.pm_bound);
}

Norm norm_of(const Ctx& ctx, const json& v, const std::string& path) {
  if (!v.is_string()) ctx.fail(path, "expected \"two\" or \"inf\"");
  try {
    return parse_norm(v.get<std::string>());
  } catch (const std::exception& e) {
    ctx.fail(path, e.what());
  }
}

ExperimentConfig build(const json& doc, const Ctx& ctx) {
  ExperimentConfig cfg;
  check_keys(ctx, doc, "", {"scenario", "sim", "filter", "analysis", "sweep", "output"});

  // scenario
  if (!doc.contains("scenario")) ctx.fail("scenario", "required");
  const json& sc = doc.at("scenario");
  check_keys(ctx, sc, "scenario", {"kind", "toy_scalar", "custom_network", "ieee14"});
  if (!sc.contains("kind")) ctx.fail("scenario.kind", "required");
  const std::string kind =
      choice(ctx, sc, "scenario", "kind", "", {"toy-scalar", "custom-network", "ieee14"});
  const std::pair<const char*, ScenarioKind> kinds[] = {{"toy_scalar", ScenarioKind::ToyScalar},
                                                        {"custom_network", ScenarioKind::CustomNetwork},
                                                        {"ieee14", ScenarioKind::Ieee14}};
  for (const auto& [key, k] : kinds) {
    if (to_string(k) == kind) cfg.scenario = k;
  }
  for (const auto& [key, k] : kinds) {
    if (sc.contains(key) && k != cfg.scenario) {
      ctx.fail(join("scenario", key), "section does not match scenario.kind '" + kind + "'");
    }
  }
  switch (cfg.scenario) {
    case ScenarioKind::ToyScalar:
      parse_toy(ctx, section(ctx, sc, "scenario", "toy_scalar"), "scenario.toy_scalar", cfg.toy);
      break;
    case ScenarioKind::CustomNetwork:
      if (!sc.contains("custom_network")) ctx.fail("scenario.custom_network", "required for custom-network");
      parse_custom(ctx, sc.at("custom_network"), "scenario.custom_network", cfg.custom);
      break;
    case ScenarioKind::Ieee14:
      parse_grid(ctx, section(ctx, sc, "scenario", "ieee14"), "scenario.ieee14", cfg.grid);
      break;
  }

  // sim
  const json& sim = section(ctx, doc, "", "sim");
  check_keys(ctx, sim, "sim", {"dt", "horizon", "norm", "domain_excursion", "check_domain"});
  cfg.sim.dt = positive(ctx, sim, "sim", "dt", cfg.sim.dt);
  cfg.sim.horizon = positive(ctx, sim, "sim", "horizon", cfg.sim.horizon);
  if (sim.contains("norm")) cfg.sim.norm = norm_of(ctx, sim.at("norm"), "sim.norm");
  cfg.sim.domain_excursion = positive(ctx, sim, "sim", "domain_excursion", cfg.sim.domain_excursion);
  cfg.sim.check_domain = boolean(ctx, sim, "sim", "check_domain", cfg.sim.check_domain);

  // filter
  const json& f = section(ctx, doc, "", "filter");
  check_keys(ctx, f, "filter", {"kind", "epsilon", "estimator"});
  const std::string fk = choice(ctx, f, "filter", "kind", "dynamic", {"none", "static", "dynamic"});
  cfg.filter = fk == "none" ? FilterKind::None : fk == "static" ? FilterKind::Static : FilterKind::Dynamic;
  cfg.sim.epsilon = positive(ctx, f, "filter", "epsilon", cfg.sim.epsilon);
  const json& est = section(ctx, f, "filter", "estimator");
  check_keys(ctx, est, "filter.estimator", {"kind", "tau_d", "bias"});
  cfg.sim.estimator.kind = choice(ctx, est, "filter.estimator", "kind", "dirty", {"dirty", "exact"}) == "exact"
                               ? EstimatorKind::Exact
                               : EstimatorKind::Dirty;
  cfg.sim.estimator.tau_d = positive(ctx, est, "filter.estimator", "tau_d", cfg.sim.estimator.tau_d);
  if (est.contains("bias")) {
    const json& b = est.at("bias");
    if (b.is_number()) {
      cfg.sim.estimator.bias = VectorXd::Constant(1, b.get<double>());  // broadcast after the model is built
    } else {
      cfg.sim.estimator.bias = vector_of(ctx, b, "filter.estimator.bias");
    }
  }
  if ((f.contains("epsilon") || f.contains("estimator")) && cfg.filter != FilterKind::Dynamic) {
    ctx.fail("filter.kind", "epsilon/estimator only apply to the dynamic filter");
  }

  // analysis
  const json& an = section(ctx, doc, "", "analysis");
  check_keys(ctx, an, "analysis", {"enabled", "norms", "samples", "pairs", "seed"});
  cfg.analysis.enabled = boolean(ctx, an, "analysis", "enabled", false);
  if (an.contains("norms")) {
    const json& ns = an.at("norms");
    if (!ns.is_array() || ns.empty()) ctx.fail("analysis.norms", "expected a non-empty array");
    cfg.analysis.norms.clear();
    for (std::size_t k = 0; k < ns.size(); ++k) {
      const Norm n = norm_of(ctx, ns[k], "analysis.norms[" + std::to_string(k) + "]");
      if (std::find(cfg.analysis.norms.begin(), cfg.analysis.norms.end(), n) != cfg.analysis.norms.end()) {
        ctx.fail("analysis.norms", "duplicate norm");
      }
      cfg.analysis.norms.push_back(n);
    }
  }
  cfg.analysis.samples = count(ctx, an, "analysis", "samples", cfg.analysis.samples);
  cfg.analysis.pairs = count(ctx, an, "analysis", "pairs", cfg.analysis.pairs);
  if (an.contains("seed")) {
    const json& seed = an.at("seed");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
      ctx.fail("analysis.seed", "expected a non-negative integer");
    }
    cfg.analysis.seed = an.at("seed").get<std::uint64_t>();
  }
  if (cfg.analysis.enabled && !cfg.analysis.seed) ctx.fail("analysis.seed", "required when analysis is enabled");

  // sweep
  if (doc.contains("sweep")) {
    const json& sw = doc.at("sweep");
    check_keys(ctx, sw, "sweep", {"eps_min", "eps_max", "count"});
    SweepConfig s;
    s.eps_min = positive(ctx, sw, "sweep", "eps_min", s.eps_min);
    s.eps_max = positive(ctx, sw, "sweep", "eps_max", s.eps_max);
    s.count = count(ctx, sw, "sweep", "count", s.count);
    if (s.eps_max < s.eps_min) ctx.fail("sweep.eps_max", "must be >= eps_min");
    cfg.sweep = s;
  }

  // output
  const json& out = section(ctx, doc, "", "output");
  check_keys(ctx, out, "output", {"dir", "csv_stride", "heatmap_stride"});
  if (out.contains("dir")) {
    if (!out.at("dir").is_string() || out.at("dir").get<std::string>().empty()) {
      ctx.fail("output.dir", "expected a non-empty path string");
    }
    cfg.output_dir = out.at("dir").get<std::string>();
  }
  cfg.csv_stride = count(ctx, out, "output", "csv_stride", cfg.csv_stride);
  cfg.heatmap_stride = count(ctx, out, "output", "heatmap_stride", cfg.heatmap_stride);

  cfg.canonical = doc;
  return cfg;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    const int line =
        1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte ? byte - 1 : 0), '\n'));
    throw ConfigError(origin, line, std::string("malformed JSON: ") + e.what());
  }
  Ctx ctx{&text};
  return build(doc, ctx);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

ExperimentConfig config_from_json(const json& doc) { return build(doc, Ctx{}); }

std::vector<std::string> preset_names() { return {"ieee14", "toy-scalar", "custom-network"}; }

json preset(const std::string& name) {
  if (name == "ieee14") {
    return json::parse(R"({
      "scenario": {
        "kind": "ieee14",
        "ieee14": {
          "generators": [2, 3, 6, 8],
          "filter_buses": "all",
          "alpha": 10,
          "nadir_hz": 59.5,
          "disturbance": {"magnitude": 3, "bus": 1, "onset": 1.0, "units": "state_derivative"},
          "domain": {"theta": 10, "omega": 1.5, "pm": 1}
        }
      },
      "sim": {"dt": 0.001, "horizon": 10, "norm": "two"},
      "filter": {"kind": "dynamic", "epsilon": 0.1, "estimator": {"kind": "dirty", "tau_d": 0.01}},
      "analysis": {"enabled": false, "norms": ["two", "inf"], "samples": 500, "pairs": 10000, "seed": 20240501},
      "sweep": {"eps_min": 0.01, "eps_max": 1, "count": 12},
      "output": {"dir": "out/ieee14", "csv_stride": 1, "heatmap_stride": 10}
    })");
  }
  if (name == "toy-scalar") {
    return json::parse(R"({
      "scenario": {
        "kind": "toy-scalar",
        "toy_scalar": {"decay": 1, "offset": 0.5, "alpha": 5, "disturbance": -2, "onset": 1, "x0": 0,
                       "box_half_width": 3}
      },
      "sim": {"dt": 0.001, "horizon": 10, "norm": "two"},
      "filter": {"kind": "dynamic", "epsilon": 0.05, "estimator": {"kind": "exact"}},
      "analysis": {"enabled": true, "norms": ["two", "inf"], "samples": 500, "pairs": 10000, "seed": 7},
      "output": {"dir": "out/toy-scalar"}
    })");
  }
  if (name == "custom-network") {
    // Two double integrators with PD control, coupled through a spring; floors on p + v.
    return json::parse(R"({
      "scenario": {
        "kind": "custom-network",
        "custom_network": {
          "state_dims": [2, 2],
          "input_dims": [1, 1],
          "coupling": [[0, 1, 0, 0], [-1, 0, 1, 0], [0, 0, 0, 1], [1, 0, -1, 0]],
          "input_blocks": [[[0], [1]], [[0], [1]]],
          "gains": [[[-2, -3]], [[-2, -3]]],
          "barriers": [{"normal": [1, 1], "offset": 1, "alpha": 4}, {"normal": [1, 1], "offset": 1, "alpha": 4}],
          "disturbance": [0, -4, 0, 0],
          "onset": 0.5,
          "x0": [0, 0, 0, 0],
          "domain": {"lower": [-3, -6, -3, -6], "upper": [3, 6, 3, 6]}
        }
      },
      "sim": {"dt": 0.001, "horizon": 8, "norm": "two"},
      "filter": {"kind": "dynamic", "epsilon": 0.02, "estimator": {"kind": "dirty", "tau_d": 0.01}},
      "analysis": {"enabled": false, "seed": 11},
      "output": {"dir": "out/custom-network"}
    })");
  }
  throw ConfigError("--preset", 0, "unknown preset '" + name + "'");
}

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::ToyScalar:
      return "toy-scalar";
    case ScenarioKind::CustomNetwork:
      return "custom-network";
    case ScenarioKind::Ieee14:
      return "ieee14";
  }
  return "?";
}

std::string to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::None:
      return "none";
    case FilterKind::Static:
      return "static";
    case FilterKind::Dynamic:
      return "dynamic";
  }
  return "?";
}

}  // namespace netcbf
