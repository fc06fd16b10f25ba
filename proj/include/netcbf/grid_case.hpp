#pragma once

// IEEE 14-bus frequency-safety case: swing dynamics with turbine-governor
// generators and grid-following inverters over a DC power-flow network.
//
// Flat state ordering is bus-major, one subsystem per bus:
//   inverter bus  (theta_n, omega_n)
//   generator bus (theta_n, omega_n, p_m_n)
// omega is the frequency deviation from nominal in Hz; every bus has one input,
// acting on its omega equation through 1/M_n.

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "netcbf/analysis_bounds.hpp"
#include "netcbf/core_model.hpp"
#include "netcbf/safety_filter.hpp"
#include "netcbf/sim_engine.hpp"

namespace netcbf::grid {

struct BusParams {
  int id = 0;
  double inertia = 0.0;                // M_n
  double damping = 0.0;                // D_n
  double turbine_time_constant = 0.0;  // tau_n, zero on inverter buses
  double droop = 0.0;                  // R_n
};

struct Line {
  int from = 0;
  int to = 0;
  double reactance = 0.0;

  double susceptance() const { return 1.0 / reactance; }
};

struct GridParams {
  std::vector<BusParams> buses;  // ordered by id, ids 1..N
  std::vector<Line> lines;
  std::vector<int> generators;
  double nominal_hz = 60.0;
  double nadir_hz = 59.5;
  double alpha = 10.0;

  std::size_t bus_count() const { return buses.size(); }
  bool is_generator(int bus) const;
  /// Throws std::invalid_argument on violated parameter invariants.
  void validate() const;
};

GridParams load_grid_params(const std::filesystem::path& lines_csv, const std::filesystem::path& buses_csv);

/// Weighted Laplacian of the line susceptances.
MatrixXd susceptance_laplacian(const GridParams& params);

/// p_n(theta) = sum_j b_nj (theta_n - theta_j).
VectorXd dc_power_injection(const GridParams& params, const VectorXd& theta);

enum class FilterBuses { All, Inverters };
enum class DisturbanceUnits { StateDerivative, Power };

struct GridOptions {
  std::filesystem::path data_dir;  // empty = bundled fixtures
  std::vector<int> generators{2, 3, 6, 8};
  FilterBuses filter_buses = FilterBuses::All;
  double alpha = 10.0;
  double nadir_hz = 59.5;
  double disturbance_magnitude = 3.0;  // load step, p.u.
  int disturbance_bus = 1;
  double disturbance_onset = 1.0;
  /// StateDerivative: w_omega = -magnitude. Power: w_omega = -magnitude / M.
  DisturbanceUnits disturbance_units = DisturbanceUnits::StateDerivative;
  double theta_bound = 10.0;  // domain box half-widths
  double omega_bound = 1.5;
  double pm_bound = 1.0;
};

std::filesystem::path bundled_data_dir();

struct GridCase {
  GridParams params;
  NetworkModel model;
  SafetySpec spec;
  DisturbanceSignal disturbance;
  VectorXd x0;
  std::vector<Index> theta_index;
  std::vector<Index> omega_index;
  std::vector<std::optional<Index>> pm_index;

  Scenario scenario() const { return {"ieee14", model, spec, disturbance, x0}; }
  /// Absolute bus frequencies (Hz) at state x.
  VectorXd frequencies_hz(const VectorXd& x) const;
};

GridCase build_ieee14(const GridOptions& options = {});

/// Per-bus barrier h_n = omega_n - (nadir - nominal), gradient e_omega, alpha(s) = alpha s.
SafetySpec frequency_cbf(const GridParams& params, FilterBuses buses);

struct ViolationSeries {
  std::vector<double> times;
  std::vector<double> violation_hz;  // max_n max{0, nadir - f_n}
  double max_violation = 0.0;
  double max_time = 0.0;
  double support_duration = 0.0;  // dt * #{k : v_k > 0}
};

ViolationSeries violation_metric(const Trajectory& traj, const GridCase& grid);

std::vector<double> log_spaced(double lo, double hi, std::size_t count);

struct SweepCell {
  double epsilon = 0.0;
  bool ok = false;
  std::string error;
  ViolationSeries violation;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  std::size_t succeeded() const;
};

/// One dynamic run per epsilon with identical disturbance and estimator. Cells whose
/// epsilon breaks dt <= epsilon/10 are flagged and skipped; per-cell errors do not stop the sweep.
SweepResult epsilon_sweep(const GridCase& grid, const std::vector<double>& eps_grid, const SimConfig& base,
                          std::size_t jobs = 1);

/// `eps,t,violation_hz`, every `stride`-th sample of each successful cell.
std::string heatmap_csv(const SweepResult& sweep, std::size_t stride = 1);

/// `t,f_1,...,f_N` in absolute Hz.
std::string frequency_csv(const Trajectory& traj, const GridCase& grid, std::size_t stride = 1);

}  // namespace netcbf::grid
