#include "netcbf/estimation.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "netcbf/errors.hpp"

namespace netcbf {

DirtyDerivative::DirtyDerivative(VectorXd x0, double tau_d) : rho_(std::move(x0)), tau_d_(tau_d) {
  if (!(tau_d_ > 0.0)) throw std::invalid_argument("dirty derivative: tau_d must be positive");
}

VectorXd DirtyDerivative::peek(const VectorXd& x) const {
  if (x.size() != rho_.size()) throw StructuralError("dirty derivative: input dimension changed");
  return (x - rho_) / tau_d_;
}

VectorXd DirtyDerivative::step(const VectorXd& x, double dt) {
  VectorXd estimate = peek(x);
  rho_ += dt * estimate;
  return estimate;
}

VectorXd exact_derivative(const NetworkModel& model, const VectorXd& x, const VectorXd& z, const VectorXd& w) {
  return model.filtered_rhs(x, z, w);
}

VectorXd record_error(const VectorXd& estimate, const VectorXd& truth, EstimateRecord& record, Norm norm) {
  if (estimate.size() != truth.size()) throw StructuralError("record_error: dimension mismatch");
  VectorXd e = estimate - truth;
  const double n = vector_norm(e, norm);
  record.error_norms.push_back(n);
  record.error_sup = std::max(record.error_sup, n);
  return e;
}

}  // namespace netcbf
