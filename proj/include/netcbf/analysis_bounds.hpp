#pragma once

// Constants entering the dynamic-filter tracking and deviation bounds, and the
// bound curves themselves checked against simulated trajectories.
//
// Every constant here is a sampled inner estimate, never a certified bound.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "netcbf/core_model.hpp"
#include "netcbf/norms.hpp"
#include "netcbf/safety_filter.hpp"
#include "netcbf/sim_engine.hpp"

namespace netcbf {

struct ConstantEstimates {
  Norm norm = Norm::Two;
  double c_F = 0.0;
  double c_F_p95 = 0.0;
  double ell_s_x = 0.0;
  double ell_s_e = 0.0;
  double B_norm = 0.0;
  double N_bar = 0.0;
  double e_bar = 0.0;
  double epsilon = 0.0;
  std::size_t sample_count = 0;
  std::size_t pair_count = 0;
  std::uint64_t seed = 0;

  /// 1/epsilon - ell_s_x ||B||
  double lambda() const { return 1.0 / epsilon - ell_s_x * B_norm; }
};

struct BoundReport {
  std::string name;
  std::vector<double> times;
  std::vector<double> empirical;
  std::vector<double> bound;
  std::vector<double> active_time;  // T_A(t_k); empty for the tracking bound
  bool satisfied = true;
  std::optional<double> first_violation_time;
  double min_slack = 0.0;
  double median_slack = 0.0;
};

/// Monte-Carlo sample of the model's domain box.
std::vector<VectorXd> sample_domain(const Box& box, std::size_t count, std::mt19937_64& rng);

/// Central-difference Jacobian with step 1e-6 * max(1, |x_j|) (scaled by fd_scale).
MatrixXd finite_difference_jacobian(const VectorField& field, const VectorXd& x, double fd_scale = 1e-6);

struct LogNormEstimate {
  double max = 0.0;
  double p95 = 0.0;
  std::size_t samples = 0;
};

/// max over samples of mu(DF(x)). Throws NumericalError on a non-finite Jacobian.
LogNormEstimate estimate_cF(const NetworkModel& model, const std::vector<VectorXd>& samples, Norm norm,
                            double fd_scale = 1e-6);

struct LipschitzOptions {
  std::size_t pairs = 10000;
  double short_range_fraction = 0.5;  // share of pairs with ||x - y|| <= short_range_scale * diameter
  double short_range_scale = 1e-3;
};

/// max ||s(x) - s(y)|| / ||x - y|| over random pairs in the domain box at the fixed w snapshot.
/// A lower estimate of the Lipschitz constant.
double estimate_lipschitz_s(const SafetySpec& spec, const NetworkModel& model, const VectorXd& w,
                            std::mt19937_64& rng, Norm norm, const LipschitzOptions& options = {});

/// max over samples of ||blkdiag(d_i grad h_i^T)|| in the induced norm.
double estimate_ell_se(const SafetySpec& spec, const NetworkModel& model, const std::vector<VectorXd>& samples,
                       Norm norm);

/// E = (eps ell_sx N_bar + ell_se e_bar) / (1 - eps ell_sx ||B||). Throws HypothesisNotMet
/// unless eps ell_sx ||B|| < 1.
double bound_E(double epsilon, double ell_s_x, double B_norm, double ell_s_e, double N_bar, double e_bar);

/// sup_k ||F(x_k) + B s(x_k) + w(t_k)|| along a trajectory with a recorded static reference.
double sup_filtered_field(const Trajectory& traj, const NetworkModel& model, const DisturbanceSignal& w, Norm norm);

/// ||z(t) - s(x(t))|| against  exp(-lambda (t - t0)) ||z~(t0)|| + E.
BoundReport prop1_bound_curve(const Trajectory& dynamic_run, const ConstantEstimates& constants);

/// Rectangle-rule T_A on [begin, end) sample indices; a sample is inactive iff both
/// static references are exactly zero there.
double active_time(const Trajectory& dynamic_run, const Trajectory& static_run, std::size_t begin,
                   std::size_t end);

/// ||x(t) - x_s(t)|| against the deviation bound with 1/lambda for the transient factor.
BoundReport active_time_and_thm1_curve(const Trajectory& dynamic_run, const Trajectory& static_run,
                                       const ConstantEstimates& constants);

/// Shared scenario pieces for verification runs.
struct Scenario {
  std::string name;
  NetworkModel model;
  SafetySpec spec;
  DisturbanceSignal disturbance;
  VectorXd x0;
};

struct VerifySettings {
  SimConfig sim;
  std::size_t samples = 500;
  LipschitzOptions lipschitz;
  std::uint64_t seed = 0;
};

struct VerificationResult {
  ConstantEstimates constants;
  std::optional<BoundReport> tracking;   // absent when its hypothesis failed
  std::optional<BoundReport> deviation;  // absent when its hypothesis failed
  std::vector<std::string> hypothesis_failures;
  std::vector<std::string> warnings;

  bool all_satisfied() const;
};

/// Runs the static and dynamic simulations with the shared disturbance, estimates the
/// constants on the domain box, and evaluates both bound curves.
VerificationResult verify_bounds(const Scenario& scenario, const VerifySettings& settings);

}  // namespace netcbf
