#pragma once

// Fixed-step forward-Euler simulation of the nominal, statically filtered and
// two-time-scale (dynamically filtered) closed loops.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "netcbf/core_model.hpp"
#include "netcbf/norms.hpp"
#include "netcbf/safety_filter.hpp"

namespace netcbf {

enum class EstimatorKind { Exact, Dirty };

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::Exact;
  double tau_d = 0.01;
  /// Constant offset added to every estimate (empty = none). Used to inject a known error.
  VectorXd bias;
};

struct SimConfig {
  double dt = 1e-3;
  double horizon = 10.0;
  double epsilon = 0.1;
  Norm norm = Norm::Two;
  EstimatorConfig estimator;
  VectorXd x0;
  VectorXd z0;  // empty = zeros
  /// Abort when a coordinate leaves the domain box by more than this fraction of its width.
  double domain_excursion = 0.1;
  bool check_domain = true;
};

/// Number of Euler steps: ceil(T/dt).
std::size_t step_count(double horizon, double dt);

enum class RunKind { Nominal, Static, Dynamic };

struct Trajectory {
  RunKind kind = RunKind::Nominal;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<VectorXd> states;
  std::vector<VectorXd> fast;              // dynamic runs only
  std::vector<VectorXd> corrections;       // correction applied at t_k
  std::vector<VectorXd> static_reference;  // s(x(t_k)); absent for nominal runs
  std::vector<std::uint8_t> active;        // s(x(t_k)) != 0; absent for nominal runs
  std::vector<double> error_norms;         // ||xdot_hat - xdot||, dynamic runs only
  double error_sup = 0.0;
  std::vector<std::string> warnings;

  std::size_t size() const noexcept { return times.size(); }
};

using TimeVaryingField = std::function<VectorXd(double, const VectorXd&)>;

/// x_{k+1} = x_k + dt rhs(t_k, x_k). Records ceil(T/dt) + 1 samples.
/// A non-null domain enables the excursion check.
Trajectory integrate_euler(const TimeVaryingField& rhs, const VectorXd& x0, const SimConfig& config,
                           const Box* domain = nullptr);

Trajectory simulate_nominal(const NetworkModel& model, const DisturbanceSignal& w, const SimConfig& config);

Trajectory simulate_static(const NetworkModel& model, const SafetySpec& spec, const DisturbanceSignal& w,
                           const SimConfig& config);

Trajectory simulate_dynamic(const NetworkModel& model, const SafetySpec& spec, const DisturbanceSignal& w,
                            const SimConfig& config);

/// Header `t,x_0..,z_0..,s_0..,active,e_norm`; z and e_norm only for dynamic runs,
/// s and active only when a static reference was recorded. Values in shortest round-trip form.
void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out);
std::string trajectory_csv(const Trajectory& trajectory);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

}  // namespace netcbf
