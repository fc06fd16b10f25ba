#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "netcbf/analysis_bounds.hpp"

namespace netcbf {

/// xdot = -decay x + u + w,  h(x) = x + offset,  alpha(s) = alpha s,
/// w = disturbance for t >= onset.
struct ToyScalarOptions {
  double decay = 1.0;
  double offset = 0.5;
  double alpha = 5.0;
  double disturbance = -2.0;
  double onset = 1.0;
  double x0 = 0.0;
  double box_half_width = 3.0;
};

Scenario make_toy_scalar(const ToyScalarOptions& options = {});

struct AffineBarrierOptions {
  VectorXd normal;
  double offset = 0.0;
  double alpha = 1.0;
};

/// Linear network  xdot = A x + b + blkdiag(B_i) (K_i x_i + u_i) + w  with affine barriers.
struct CustomNetworkOptions {
  std::vector<Index> state_dims;
  std::vector<Index> input_dims;
  MatrixXd coupling;
  VectorXd drift;                   // empty = zero
  std::vector<MatrixXd> input_blocks;
  std::vector<MatrixXd> gains;      // K_i (m_i x n_i); empty = zero controller
  std::vector<std::optional<AffineBarrierOptions>> barriers;
  VectorXd disturbance;             // empty = zero
  double onset = 0.0;
  VectorXd x0;
  Box domain;
};

Scenario make_custom_network(const CustomNetworkOptions& options);

}  // namespace netcbf
