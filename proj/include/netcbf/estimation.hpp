#pragma once

#include <Eigen/Dense>

#include <vector>

#include "netcbf/core_model.hpp"
#include "netcbf/norms.hpp"

namespace netcbf {

/// First-order "dirty derivative"  rho' = (x - rho)/tau_d,  xdot_hat = (x - rho)/tau_d.
/// Discretized with forward Euler; the estimate at step k uses the pre-update rho.
class DirtyDerivative {
 public:
  /// rho(0) = x0, so the first estimate is zero.
  DirtyDerivative(VectorXd x0, double tau_d);

  /// Returns the estimate for the current sample, then advances rho by dt.
  VectorXd step(const VectorXd& x, double dt);
  /// Estimate at the current sample without advancing.
  VectorXd peek(const VectorXd& x) const;

  const VectorXd& rho() const noexcept { return rho_; }
  double tau_d() const noexcept { return tau_d_; }

 private:
  VectorXd rho_;
  double tau_d_;
};

/// True state derivative of the two-time-scale plant: F(x) + B z + w. Needs the global
/// model, so it is only usable by the harness, never by a local filter.
VectorXd exact_derivative(const NetworkModel& model, const VectorXd& x, const VectorXd& z, const VectorXd& w);

struct EstimateRecord {
  std::vector<double> error_norms;
  double error_sup = 0.0;  // running max of ||estimate - truth||
};

/// Appends ||est - truth|| and updates the running sup. Returns the error vector.
VectorXd record_error(const VectorXd& estimate, const VectorXd& truth, EstimateRecord& record, Norm norm);

}  // namespace netcbf
