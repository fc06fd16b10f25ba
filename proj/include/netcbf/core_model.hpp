#pragma once

// Networked dynamics  xdot_i = f_i(x) + B_i u_i + w_i  with local nominal
// controllers u_i = kappa_i(x_i). The stacked state is subsystem-major:
// x = (x_1, ..., x_N), and likewise for inputs.

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "netcbf/norms.hpp"

namespace netcbf {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

class SubsystemLayout {
 public:
  SubsystemLayout() = default;
  SubsystemLayout(std::vector<Index> state_dims, std::vector<Index> input_dims);

  std::size_t count() const noexcept { return state_dims_.size(); }
  Index state_dim() const noexcept { return state_offsets_.back(); }
  Index input_dim() const noexcept { return input_offsets_.back(); }

  Index state_dim(std::size_t i) const { return state_dims_.at(i); }
  Index input_dim(std::size_t i) const { return input_dims_.at(i); }
  Index state_offset(std::size_t i) const { return state_offsets_.at(i); }
  Index input_offset(std::size_t i) const { return input_offsets_.at(i); }

  VectorXd state_block(const VectorXd& x, std::size_t i) const;
  VectorXd input_block(const VectorXd& u, std::size_t i) const;

  std::vector<VectorXd> split_states(const VectorXd& x) const;
  VectorXd stack_states(const std::vector<VectorXd>& blocks) const;
  std::vector<VectorXd> split_inputs(const VectorXd& u) const;
  VectorXd stack_inputs(const std::vector<VectorXd>& blocks) const;

  void require_state(const VectorXd& x, const char* what) const;
  void require_input(const VectorXd& u, const char* what) const;

 private:
  std::vector<Index> state_dims_;
  std::vector<Index> input_dims_;
  std::vector<Index> state_offsets_{0};
  std::vector<Index> input_offsets_{0};
};

/// Axis-aligned compact box used for constant estimation and domain checks.
struct Box {
  VectorXd lower;
  VectorXd upper;

  Index dim() const noexcept { return lower.size(); }
  bool contains(const VectorXd& x, double excursion_fraction = 0.0) const;
  VectorXd sample(std::mt19937_64& rng) const;
  double diameter(Norm norm) const;
};

using VectorField = std::function<VectorXd(const VectorXd&)>;
using LocalController = std::function<VectorXd(const VectorXd&)>;

/// Immutable after construction; evaluators must be re-entrant.
class NetworkModel {
 public:
  NetworkModel(SubsystemLayout layout, VectorField coupling, std::vector<MatrixXd> input_blocks,
               std::vector<LocalController> nominal, Box domain);

  const SubsystemLayout& layout() const noexcept { return layout_; }
  const Box& domain() const noexcept { return domain_; }
  const MatrixXd& input_block(std::size_t i) const { return input_blocks_.at(i); }
  const std::vector<MatrixXd>& input_blocks() const noexcept { return input_blocks_; }

  /// Dense n x m assembly of blkdiag(B_1, ..., B_N).
  MatrixXd input_matrix() const;

  /// f(x)
  VectorXd coupling(const VectorXd& x) const;
  /// kappa(x), stacked
  VectorXd nominal_input(const VectorXd& x) const;
  /// B u, evaluated block by block.
  VectorXd apply_input(const VectorXd& u) const;
  /// F(x) = f(x) + B kappa(x)
  VectorXd nominal_closed_loop(const VectorXd& x) const;
  /// F(x) + B correction + w
  VectorXd filtered_rhs(const VectorXd& x, const VectorXd& correction, const VectorXd& w) const;

 private:
  SubsystemLayout layout_;
  VectorField coupling_;
  std::vector<MatrixXd> input_blocks_;
  std::vector<LocalController> nominal_;
  Box domain_;
};

/// Exogenous input t -> w(t) with a recorded sup-norm bound over the horizon.
struct DisturbanceSignal {
  std::function<VectorXd(double)> evaluate;
  double essential_bound = 0.0;

  VectorXd operator()(double t) const { return evaluate(t); }

  /// True when ||w(t_k)|| <= essential_bound on the grid t_k = k dt, k dt <= horizon.
  bool bound_holds(double horizon, double dt, Norm norm) const;
};

DisturbanceSignal zero_disturbance(Index n);
DisturbanceSignal constant_disturbance(VectorXd value, Norm norm = Norm::Two);
/// w(t) = 0 for t < onset, value afterwards.
DisturbanceSignal step_disturbance(VectorXd value, double onset, Norm norm = Norm::Two);

}  // namespace netcbf
