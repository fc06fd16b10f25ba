#include "netcbf/grid_case.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "netcbf/errors.hpp"

#ifndef NETCBF_DATA_DIR
#define NETCBF_DATA_DIR "data"
#endif

namespace netcbf::grid {

bool GridParams::is_generator(int bus) const {
  return std::find(generators.begin(), generators.end(), bus) != generators.end();
}

void GridParams::validate() const {
  if (buses.empty()) throw std::invalid_argument("grid: no buses");
  for (std::size_t k = 0; k < buses.size(); ++k) {
    const auto& b = buses[k];
    const std::string tag = "grid: bus " + std::to_string(b.id);
    if (b.id != static_cast<int>(k) + 1) throw std::invalid_argument("grid: bus ids must be 1..N in order");
    if (!(b.inertia > 0.0) || !(b.damping > 0.0)) throw std::invalid_argument(tag + " needs M > 0 and D > 0");
    const bool gen = is_generator(b.id);
    if (gen && !(b.turbine_time_constant > 0.0)) {
      throw std::invalid_argument(tag + " is a generator but has zero/missing turbine time constant");
    }
    if (!gen && b.turbine_time_constant != 0.0) {
      throw std::invalid_argument(tag + " has a turbine time constant but is not in the generator set");
    }
  }
  for (int g : generators) {
    if (g < 1 || g > static_cast<int>(buses.size())) throw std::invalid_argument("grid: generator bus out of range");
  }
  for (const auto& l : lines) {
    if (l.from < 1 || l.to < 1 || l.from > static_cast<int>(buses.size()) || l.to > static_cast<int>(buses.size()) ||
        l.from == l.to) {
      throw std::invalid_argument("grid: invalid line endpoints");
    }
    if (!(l.reactance > 0.0)) throw std::invalid_argument("grid: line reactance must be positive");
  }
}

namespace {

std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path, std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  bool header_seen = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": not a number: '" + cell + "'");
      }
    }
    if (row.size() != columns) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(columns) + " columns");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

GridParams load_grid_params(const std::filesystem::path& lines_csv, const std::filesystem::path& buses_csv) {
  GridParams p;
  for (const auto& r : read_numeric_csv(lines_csv, 3)) {
    p.lines.push_back({static_cast<int>(r[0]), static_cast<int>(r[1]), r[2]});
  }
  for (const auto& r : read_numeric_csv(buses_csv, 5)) {
    p.buses.push_back({static_cast<int>(r[0]), r[1], r[2], r[3], r[4]});
  }
  std::sort(p.buses.begin(), p.buses.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return p;
}

MatrixXd susceptance_laplacian(const GridParams& params) {
  const auto n = static_cast<Index>(params.bus_count());
  MatrixXd lap = MatrixXd::Zero(n, n);
  for (const auto& l : params.lines) {
    const Index a = l.from - 1;
    const Index b = l.to - 1;
    const double s = l.susceptance();
    lap(a, a) += s;
    lap(b, b) += s;
    lap(a, b) -= s;
    lap(b, a) -= s;
  }
  return lap;
}

VectorXd dc_power_injection(const GridParams& params, const VectorXd& theta) {
  if (theta.size() != static_cast<Index>(params.bus_count())) {
    throw StructuralError("dc_power_injection: angle vector length differs from bus count");
  }
  VectorXd p = VectorXd::Zero(theta.size());
  for (const auto& l : params.lines) {
    const Index a = l.from - 1;
    const Index b = l.to - 1;
    const double flow = l.susceptance() * (theta(a) - theta(b));
    p(a) += flow;
    p(b) -= flow;
  }
  return p;
}

std::filesystem::path bundled_data_dir() { return NETCBF_DATA_DIR; }

SafetySpec frequency_cbf(const GridParams& params, FilterBuses buses) {
  const double offset = params.nominal_hz - params.nadir_hz;  // h = omega - (nadir - nominal)
  std::vector<std::optional<BarrierFunction>> barriers;
  for (const auto& bus : params.buses) {
    const bool gen = params.is_generator(bus.id);
    if (gen && buses == FilterBuses::Inverters) {
      barriers.emplace_back(std::nullopt);
      continue;
    }
    VectorXd normal = VectorXd::Zero(gen ? 3 : 2);
    normal(1) = 1.0;
    barriers.emplace_back(affine_barrier(normal, offset, params.alpha));
  }
  return SafetySpec(std::move(barriers));
}

VectorXd GridCase::frequencies_hz(const VectorXd& x) const {
  VectorXd f(static_cast<Index>(omega_index.size()));
  for (std::size_t n = 0; n < omega_index.size(); ++n) f(static_cast<Index>(n)) = params.nominal_hz + x(omega_index[n]);
  return f;
}

namespace {

struct Indexing {
  std::vector<Index> theta, omega;
  std::vector<std::optional<Index>> pm;
  std::vector<Index> state_dims, input_dims;
};

Indexing make_indexing(const GridParams& params) {
  Indexing idx;
  Index offset = 0;
  for (const auto& bus : params.buses) {
    const bool gen = params.is_generator(bus.id);
    idx.theta.push_back(offset);
    idx.omega.push_back(offset + 1);
    idx.pm.push_back(gen ? std::optional<Index>(offset + 2) : std::nullopt);
    const Index dim = gen ? 3 : 2;
    idx.state_dims.push_back(dim);
    idx.input_dims.push_back(1);
    offset += dim;
  }
  return idx;
}

}  // namespace

GridCase build_ieee14(const GridOptions& options) {
  const auto dir = options.data_dir.empty() ? bundled_data_dir() : options.data_dir;
  GridParams params = load_grid_params(dir / "ieee14_lines.csv", dir / "ieee14_buses.csv");
  params.generators = options.generators;
  params.alpha = options.alpha;
  params.nadir_hz = options.nadir_hz;
  params.validate();
  if (options.disturbance_bus < 1 || options.disturbance_bus > static_cast<int>(params.bus_count())) {
    throw std::invalid_argument("grid: disturbance bus out of range");
  }

  const Indexing idx = make_indexing(params);
  SubsystemLayout layout(idx.state_dims, idx.input_dims);
  const Index n = layout.state_dim();
  const std::size_t buses = params.bus_count();

  const MatrixXd laplacian = susceptance_laplacian(params);
  auto coupling = [params, idx, laplacian, buses, n](const VectorXd& x) -> VectorXd {
    VectorXd theta(static_cast<Index>(buses));
    for (std::size_t k = 0; k < buses; ++k) theta(static_cast<Index>(k)) = x(idx.theta[k]);
    const VectorXd injection = laplacian * theta;
    VectorXd dx(n);
    for (std::size_t k = 0; k < buses; ++k) {
      const auto& bus = params.buses[k];
      const double omega = x(idx.omega[k]);
      double mech = 0.0;
      if (idx.pm[k]) {
        const double pm = x(*idx.pm[k]);
        mech = pm;
        dx(*idx.pm[k]) = (-pm - bus.droop * omega) / bus.turbine_time_constant;
      }
      dx(idx.theta[k]) = omega;
      dx(idx.omega[k]) = (-bus.damping * omega + mech - injection(static_cast<Index>(k))) / bus.inertia;
    }
    return dx;
  };

  std::vector<MatrixXd> blocks;
  std::vector<LocalController> nominal;
  for (std::size_t k = 0; k < buses; ++k) {
    MatrixXd b = MatrixXd::Zero(idx.state_dims[k], 1);
    b(1, 0) = 1.0 / params.buses[k].inertia;
    blocks.push_back(std::move(b));
    nominal.emplace_back([](const VectorXd&) { return VectorXd::Zero(1).eval(); });
  }

  Box box{VectorXd(n), VectorXd(n)};
  for (std::size_t k = 0; k < buses; ++k) {
    box.lower(idx.theta[k]) = -options.theta_bound;
    box.upper(idx.theta[k]) = options.theta_bound;
    box.lower(idx.omega[k]) = -options.omega_bound;
    box.upper(idx.omega[k]) = options.omega_bound;
    if (idx.pm[k]) {
      box.lower(*idx.pm[k]) = -options.pm_bound;
      box.upper(*idx.pm[k]) = options.pm_bound;
    }
  }

  VectorXd step = VectorXd::Zero(n);
  const auto bus_k = static_cast<std::size_t>(options.disturbance_bus - 1);
  const double scale =
      options.disturbance_units == DisturbanceUnits::Power ? 1.0 / params.buses[bus_k].inertia : 1.0;
  step(idx.omega[bus_k]) = -options.disturbance_magnitude * scale;

  NetworkModel model(std::move(layout), std::move(coupling), std::move(blocks), std::move(nominal), std::move(box));
  SafetySpec spec = frequency_cbf(params, options.filter_buses);
  return GridCase{std::move(params),
                  std::move(model),
                  std::move(spec),
                  step_disturbance(step, options.disturbance_onset),
                  VectorXd::Zero(n),
                  idx.theta,
                  idx.omega,
                  idx.pm};
}

ViolationSeries violation_metric(const Trajectory& traj, const GridCase& grid) {
  ViolationSeries v;
  v.times = traj.times;
  v.violation_hz.reserve(traj.size());
  const double floor_dev = grid.params.nadir_hz - grid.params.nominal_hz;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    double worst = 0.0;
    for (Index idx : grid.omega_index) worst = std::max(worst, floor_dev - traj.states[k](idx));
    v.violation_hz.push_back(worst);
    if (worst > v.max_violation) {
      v.max_violation = worst;
      v.max_time = traj.times[k];
    }
    if (worst > 0.0) v.support_duration += traj.dt;
  }
  return v;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo) || count == 0) throw std::invalid_argument("log_spaced: need 0 < lo <= hi, count > 0");
  if (count == 1) return {lo};
  std::vector<double> out(count);
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t k = 0; k < count; ++k) {
    out[k] = std::pow(10.0, a + (b - a) * static_cast<double>(k) / static_cast<double>(count - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::size_t SweepResult::succeeded() const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const auto& c) { return c.ok; }));
}

SweepResult epsilon_sweep(const GridCase& grid, const std::vector<double>& eps_grid, const SimConfig& base,
                          std::size_t jobs) {
  SweepResult result;
  result.cells.resize(eps_grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < eps_grid.size(); k = next++) {
      SweepCell& cell = result.cells[k];
      cell.epsilon = eps_grid[k];
      if (!(eps_grid[k] > 0.0) || base.dt > eps_grid[k] / 10.0 * (1.0 + 1e-12)) {
        cell.error = "dt guard: dt = " + format_double(base.dt) + " > epsilon/10 for epsilon = " +
                     format_double(eps_grid[k]);
        continue;
      }
      try {
        SimConfig cfg = base;
        cfg.epsilon = eps_grid[k];
        cfg.x0 = grid.x0;
        const Trajectory traj = simulate_dynamic(grid.model, grid.spec, grid.disturbance, cfg);
        cell.violation = violation_metric(traj, grid);
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, eps_grid.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return result;
}

std::string heatmap_csv(const SweepResult& sweep, std::size_t stride) {
  stride = std::max<std::size_t>(1, stride);
  std::ostringstream out;
  out << "eps,t,violation_hz\n";
  for (const auto& cell : sweep.cells) {
    if (!cell.ok) continue;
    const auto& v = cell.violation;
    for (std::size_t k = 0; k < v.times.size(); k += stride) {
      out << format_double(cell.epsilon) << ',' << format_double(v.times[k]) << ','
          << format_double(v.violation_hz[k]) << '\n';
    }
  }
  return out.str();
}

std::string frequency_csv(const Trajectory& traj, const GridCase& grid, std::size_t stride) {
  stride = std::max<std::size_t>(1, stride);
  std::ostringstream out;
  out << 't';
  for (const auto& bus : grid.params.buses) out << ",f_" << bus.id;
  out << '\n';
  for (std::size_t k = 0; k < traj.size(); k += stride) {
    out << format_double(traj.times[k]);
    const VectorXd f = grid.frequencies_hz(traj.states[k]);
    for (Index j = 0; j < f.size(); ++j) out << ',' << format_double(f(j));
    out << '\n';
  }
  return out.str();
}

}  // namespace netcbf::grid
