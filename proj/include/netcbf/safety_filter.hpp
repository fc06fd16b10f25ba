#pragma once

// Closed-form CBF safety filter for separable constraints
//   grad h_i(x_i)^T (F_i(x) + B_i theta_i + w_i) + alpha_i(h_i(x_i)) >= 0,
// its perturbed and measurement-based variants, and an iterative QP oracle.

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "netcbf/core_model.hpp"

namespace netcbf {

/// Below this ||B_i^T grad h_i|| the correction direction is undefined.
inline constexpr double kDegeneracyTolerance = 1e-10;

/// Extended class-K_inf gain.
struct ClassKFunction {
  std::function<double(double)> evaluate;

  double operator()(double s) const { return evaluate(s); }
  static ClassKFunction linear(double gain);
};

struct BarrierFunction {
  std::function<double(const VectorXd&)> value;
  std::function<VectorXd(const VectorXd&)> gradient;
  ClassKFunction alpha;
};

/// h(x_i) = c^T x_i + offset with alpha(s) = gain * s.
BarrierFunction affine_barrier(VectorXd normal, double offset, double gain);

/// One optional barrier per subsystem; subsystems without one are never corrected.
class SafetySpec {
 public:
  explicit SafetySpec(std::vector<std::optional<BarrierFunction>> barriers);

  std::size_t count() const noexcept { return barriers_.size(); }
  bool constrained(std::size_t i) const { return barriers_.at(i).has_value(); }
  const BarrierFunction& barrier(std::size_t i) const;

  /// Throws StructuralError if the spec does not cover the model's subsystems.
  void require_compatible(const NetworkModel& model) const;

 private:
  std::vector<std::optional<BarrierFunction>> barriers_;
};

struct FilterEvaluation {
  VectorXd eta;                        // +inf for unconstrained subsystems
  std::vector<VectorXd> directions;    // d_i; zero where undefined and not needed
  VectorXd correction;                 // stacked s(x)
  std::vector<bool> active;            // eta_i < 0

  bool any_active() const;
};

/// eta_i(x) = grad h_i^T (F_i(x) + w_i) + alpha_i(h_i(x_i)).
VectorXd eval_eta(const SafetySpec& spec, const NetworkModel& model, const VectorXd& x, const VectorXd& w);

/// d_i = B_i^T grad h_i / ||B_i^T grad h_i||_2^2. Throws WellPosednessViolation when degenerate.
VectorXd eval_direction(const BarrierFunction& barrier, const MatrixXd& input_block, const VectorXd& x_i,
                        std::size_t subsystem = 0);

FilterEvaluation static_filter(const SafetySpec& spec, const NetworkModel& model, const VectorXd& x,
                               const VectorXd& w);

/// s_{e,i} = d_i max{0, -eta_i(x) - grad h_i^T e_i}.
VectorXd perturbed_static_filter(const SafetySpec& spec, const NetworkModel& model, const VectorXd& x,
                                 const VectorXd& w, const VectorXd& e);

/// Local measurement-based target  d_i max{0, -(grad h_i^T (xdot_hat_i - B_i z_i) + alpha_i(h_i))}.
/// Only subsystem-local data enters.
VectorXd dynamic_filter_target(const BarrierFunction& barrier, const MatrixXd& input_block, const VectorXd& x_i,
                               const VectorXd& z_i, const VectorXd& xdot_hat_i, std::size_t subsystem = 0);

/// Applies dynamic_filter_target subsystem by subsystem; zero for unconstrained blocks.
VectorXd dynamic_filter_targets(const SafetySpec& spec, const NetworkModel& model, const VectorXd& x,
                                const VectorXd& z, const VectorXd& xdot_hat);

struct QpOracleOptions {
  int max_iterations = 10000;
  double residual_tolerance = 1e-12;
  double step = 0.25;  // gradient step on ||theta||^2
};

/// Projected gradient descent on  min ||theta||^2  over the product of half-spaces.
/// Throws Infeasible when a constrained block has B_i^T grad h_i = 0 and eta_i < 0.
VectorXd qp_oracle(const SafetySpec& spec, const NetworkModel& model, const VectorXd& x, const VectorXd& w,
                   const QpOracleOptions& options = {});

/// Generic dense strictly-convex QP  min ||theta||^2  s.t.  G theta >= g  by active-set
/// enumeration over the KKT system. Exponential in rows; meant for small test instances.
VectorXd active_set_qp(const MatrixXd& constraint_matrix, const VectorXd& constraint_rhs);

/// Constraint rows (G, g) of the stacked QP at x: one row per constrained subsystem.
std::pair<MatrixXd, VectorXd> stacked_qp_constraints(const SafetySpec& spec, const NetworkModel& model,
                                                     const VectorXd& x, const VectorXd& w);

struct WellPosednessReport {
  std::size_t samples = 0;
  std::size_t near_boundary = 0;
  double min_gradient_norm = std::numeric_limits<double>::infinity();  // over near-boundary samples
  std::size_t degenerate_points = 0;
  std::size_t unsolvable_points = 0;  // QP infeasible at the sample
  bool pass = true;
};

WellPosednessReport check_wellposed(const SafetySpec& spec, const NetworkModel& model,
                                    const std::vector<VectorXd>& samples, const VectorXd& w,
                                    double boundary_band = 1e-2);

}  // namespace netcbf
