#include "netcbf/safety_filter.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "netcbf/errors.hpp"

namespace netcbf {

ClassKFunction ClassKFunction::linear(double gain) {
  if (!(gain > 0.0)) throw std::invalid_argument("class-K gain must be positive");
  return {[gain](double s) { return gain * s; }};
}

BarrierFunction affine_barrier(VectorXd normal, double offset, double gain) {
  BarrierFunction b;
  b.value = [normal, offset](const VectorXd& xi) { return normal.dot(xi) + offset; };
  b.gradient = [normal](const VectorXd&) { return normal; };
  b.alpha = ClassKFunction::linear(gain);
  return b;
}

SafetySpec::SafetySpec(std::vector<std::optional<BarrierFunction>> barriers) : barriers_(std::move(barriers)) {
  for (const auto& b : barriers_) {
    if (b && (!b->value || !b->gradient || !b->alpha.evaluate)) {
      throw StructuralError("safety spec: barrier with an empty evaluator");
    }
  }
}

const BarrierFunction& SafetySpec::barrier(std::size_t i) const {
  const auto& b = barriers_.at(i);
  if (!b) throw StructuralError("safety spec: subsystem " + std::to_string(i) + " has no barrier");
  return *b;
}

void SafetySpec::require_compatible(const NetworkModel& model) const {
  if (count() != model.layout().count()) {
    throw StructuralError("safety spec covers " + std::to_string(count()) + " subsystems, model has " +
                          std::to_string(model.layout().count()));
  }
}

bool FilterEvaluation::any_active() const { return std::find(active.begin(), active.end(), true) != active.end(); }

namespace {

// eta_i given the already evaluated F(x) + w.
double eta_from_drift(const BarrierFunction& barrier, const VectorXd& xi, const VectorXd& drift_i) {
  return barrier.gradient(xi).dot(drift_i) + barrier.alpha(barrier.value(xi));
}

}  // namespace

VectorXd eval_eta(const SafetySpec& spec, const NetworkModel& model, const VectorXd& x, const VectorXd& w) {
  spec.require_compatible(model);
  const auto& layout = model.layout();
  layout.require_state(w, "eval_eta(w)");
  const VectorXd drift = model.nominal_closed_loop(x) + w;
  VectorXd eta(static_cast<Index>(layout.count()));
  for (std::size_t i = 0; i < layout.count(); ++i) {
    eta(static_cast<Index>(i)) =
        spec.constrained(i)
            ? eta_from_drift(spec.barrier(i), layout.state_block(x, i), layout.state_block(drift, i))
            : std::numeric_limits<double>::infinity();
  }
  return eta;
}

VectorXd eval_direction(const BarrierFunction& barrier, const MatrixXd& input_block, const VectorXd& x_i,
                        std::size_t subsystem) {
  const VectorXd grad = barrier.gradient(x_i);
  if (grad.size() != input_block.rows()) throw StructuralError("eval_direction: gradient/B_i size mismatch");
  const VectorXd a = input_block.transpose() * grad;
  const double norm = a.norm();
  if (!(norm > kDegeneracyTolerance)) {
    throw WellPosednessViolation(subsystem, norm,
                                 "subsystem " + std::to_string(subsystem) + ": ||B_i^T grad h_i|| = " +
                                     std::to_string(norm) + " <= 1e-10, correction direction undefined");
  }
  return a / (norm * norm);
}

FilterEvaluation static_filter(const SafetySpec& spec, const NetworkModel& model, const VectorXd& x,
                               const VectorXd& w) {
  const auto& layout = model.layout();
  FilterEvaluation out;
  out.eta = eval_eta(spec, model, x, w);
  out.correction = VectorXd::Zero(layout.input_dim());
  out.directions.reserve(layout.count());
  out.active.assign(layout.count(), false);
  for (std::size_t i = 0; i < layout.count(); ++i) {
    VectorXd d = VectorXd::Zero(layout.input_dim(i));
    const double eta = out.eta(static_cast<Index>(i));
    if (spec.constrained(i)) {
      const VectorXd xi = layout.state_block(x, i);
      if (eta < 0.0) {
        d = eval_direction(spec.barrier(i), model.input_block(i), xi, i);
        out.active[i] = true;
        out.correction.segment(layout.input_offset(i), layout.input_dim(i)) = d * (-eta);
      } else {
        const VectorXd a = model.input_block(i).transpose() * spec.barrier(i).gradient(xi);
        if (a.norm() > kDegeneracyTolerance) d = a / a.squaredNorm();
      }
    }
    out.directions.push_back(std::move(d));
  }
  return out;
}

VectorXd perturbed_static_filter(const SafetySpec& spec, const NetworkModel& model, const VectorXd& x,
                                 const VectorXd& w, const VectorXd& e) {
  const auto& layout = model.layout();
  layout.require_state(e, "perturbed_static_filter(e)");
  const VectorXd eta = eval_eta(spec, model, x, w);
  VectorXd s = VectorXd::Zero(layout.input_dim());
  for (std::size_t i = 0; i < layout.count(); ++i) {
    if (!spec.constrained(i)) continue;
    const VectorXd xi = layout.state_block(x, i);
    const double shifted = -eta(static_cast<Index>(i)) - spec.barrier(i).gradient(xi).dot(layout.state_block(e, i));
    if (shifted > 0.0) {
      s.segment(layout.input_offset(i), layout.input_dim(i)) =
          eval_direction(spec.barrier(i), model.input_block(i), xi, i) * shifted;
    }
  }
  return s;
}

VectorXd dynamic_filter_target(const BarrierFunction& barrier, const MatrixXd& input_block, const VectorXd& x_i,
                               const VectorXd& z_i, const VectorXd& xdot_hat_i, std::size_t subsystem) {
  if (xdot_hat_i.size() != x_i.size() || z_i.size() != input_block.cols() || x_i.size() != input_block.rows()) {
    throw StructuralError("dynamic_filter_target: local dimension mismatch");
  }
  const VectorXd grad = barrier.gradient(x_i);
  const double eta_hat = grad.dot(xdot_hat_i - input_block * z_i) + barrier.alpha(barrier.value(x_i));
  if (!(eta_hat < 0.0)) return VectorXd::Zero(z_i.size());
  return eval_direction(barrier, input_block, x_i, subsystem) * (-eta_hat);
}

VectorXd dynamic_filter_targets(const SafetySpec& spec, const NetworkModel& model, const VectorXd& x,
                                const VectorXd& z, const VectorXd& xdot_hat) {
  spec.require_compatible(model);
  const auto& layout = model.layout();
  layout.require_state(x, "dynamic_filter_targets(x)");
  layout.require_state(xdot_hat, "dynamic_filter_targets(xdot_hat)");
  layout.require_input(z, "dynamic_filter_targets(z)");
  VectorXd out = VectorXd::Zero(layout.input_dim());
  for (std::size_t i = 0; i < layout.count(); ++i) {
    if (!spec.constrained(i)) continue;
    out.segment(layout.input_offset(i), layout.input_dim(i)) =
        dynamic_filter_target(spec.barrier(i), model.input_block(i), layout.state_block(x, i),
                              layout.input_block(z, i), layout.state_block(xdot_hat, i), i);
  }
  return out;
}

std::pair<MatrixXd, VectorXd> stacked_qp_constraints(const SafetySpec& spec, const NetworkModel& model,
                                                     const VectorXd& x, const VectorXd& w) {
  const auto& layout = model.layout();
  const VectorXd eta = eval_eta(spec, model, x, w);
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < layout.count(); ++i) {
    if (spec.constrained(i)) rows.push_back(i);
  }
  MatrixXd g = MatrixXd::Zero(static_cast<Index>(rows.size()), layout.input_dim());
  VectorXd rhs(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t i = rows[r];
    const VectorXd a = model.input_block(i).transpose() * spec.barrier(i).gradient(layout.state_block(x, i));
    g.block(static_cast<Index>(r), layout.input_offset(i), 1, layout.input_dim(i)) = a.transpose();
    rhs(static_cast<Index>(r)) = -eta(static_cast<Index>(i));
  }
  return {std::move(g), std::move(rhs)};
}

VectorXd qp_oracle(const SafetySpec& spec, const NetworkModel& model, const VectorXd& x, const VectorXd& w,
                   const QpOracleOptions& options) {
  const auto& layout = model.layout();
  const VectorXd eta = eval_eta(spec, model, x, w);

  // Half-space {theta_i : a_i^T theta_i >= b_i} per constrained block.
  std::vector<VectorXd> normals(layout.count());
  std::vector<double> levels(layout.count(), 0.0);
  for (std::size_t i = 0; i < layout.count(); ++i) {
    if (!spec.constrained(i)) continue;
    normals[i] = model.input_block(i).transpose() * spec.barrier(i).gradient(layout.state_block(x, i));
    levels[i] = -eta(static_cast<Index>(i));
    if (normals[i].squaredNorm() == 0.0 && levels[i] > 0.0) {
      throw Infeasible("qp_oracle: subsystem " + std::to_string(i) + " has B_i^T grad h_i = 0 with eta_i < 0");
    }
  }

  auto project = [&](VectorXd v) {
    for (std::size_t i = 0; i < layout.count(); ++i) {
      if (!spec.constrained(i) || normals[i].squaredNorm() == 0.0) continue;
      auto block = v.segment(layout.input_offset(i), layout.input_dim(i));
      const double gap = levels[i] - normals[i].dot(block);
      if (gap > 0.0) block += normals[i] * (gap / normals[i].squaredNorm());
    }
    return v;
  };

  VectorXd theta = project(VectorXd::Ones(layout.input_dim()));
  for (int it = 0; it < options.max_iterations; ++it) {
    VectorXd next = project(theta - options.step * 2.0 * theta);
    const double residual = (next - theta).norm();
    theta = std::move(next);
    if (residual < options.residual_tolerance) break;
  }
  return theta;
}

VectorXd active_set_qp(const MatrixXd& constraint_matrix, const VectorXd& constraint_rhs) {
  const Index rows = constraint_matrix.rows();
  const Index dim = constraint_matrix.cols();
  if (constraint_rhs.size() != rows) throw StructuralError("active_set_qp: rhs size mismatch");
  if (rows > 20) throw std::invalid_argument("active_set_qp: too many constraints for enumeration");

  constexpr double tol = 1e-10;
  VectorXd best;
  double best_norm = std::numeric_limits<double>::infinity();
  const unsigned long subsets = 1ul << static_cast<unsigned>(rows);
  for (unsigned long mask = 0; mask < subsets; ++mask) {
    std::vector<Index> active;
    for (Index r = 0; r < rows; ++r) {
      if (mask & (1ul << static_cast<unsigned>(r))) active.push_back(r);
    }
    VectorXd theta = VectorXd::Zero(dim);
    VectorXd multipliers;
    if (!active.empty()) {
      MatrixXd ga(static_cast<Index>(active.size()), dim);
      VectorXd ba(static_cast<Index>(active.size()));
      for (std::size_t k = 0; k < active.size(); ++k) {
        ga.row(static_cast<Index>(k)) = constraint_matrix.row(active[k]);
        ba(static_cast<Index>(k)) = constraint_rhs(active[k]);
      }
      // Stationarity theta = G_A^T mu, primal equality G_A theta = b_A.
      const MatrixXd gram = ga * ga.transpose();
      Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(gram);
      multipliers = cod.solve(ba);
      theta = ga.transpose() * multipliers;
      if ((ga * theta - ba).norm() > tol * (1.0 + ba.norm())) continue;
      if ((multipliers.array() < -tol).any()) continue;
    }
    if (rows > 0 && ((constraint_matrix * theta - constraint_rhs).array() < -tol).any()) continue;
    const double n = theta.norm();
    if (n < best_norm) {
      best_norm = n;
      best = theta;
    }
  }
  if (best.size() == 0) throw Infeasible("active_set_qp: no feasible active set");
  return best;
}

WellPosednessReport check_wellposed(const SafetySpec& spec, const NetworkModel& model,
                                    const std::vector<VectorXd>& samples, const VectorXd& w, double boundary_band) {
  spec.require_compatible(model);
  const auto& layout = model.layout();
  WellPosednessReport report;
  report.samples = samples.size();
  for (const auto& x : samples) {
    const VectorXd eta = eval_eta(spec, model, x, w);
    bool solvable = true;
    for (std::size_t i = 0; i < layout.count(); ++i) {
      if (!spec.constrained(i)) continue;
      const VectorXd xi = layout.state_block(x, i);
      const double gnorm = (model.input_block(i).transpose() * spec.barrier(i).gradient(xi)).norm();
      if (std::abs(spec.barrier(i).value(xi)) < boundary_band) {
        ++report.near_boundary;
        report.min_gradient_norm = std::min(report.min_gradient_norm, gnorm);
        if (!(gnorm > kDegeneracyTolerance)) ++report.degenerate_points;
      }
      if (gnorm == 0.0 && eta(static_cast<Index>(i)) < 0.0) solvable = false;
    }
    if (!solvable) ++report.unsolvable_points;
  }
  report.pass = report.degenerate_points == 0 && report.unsolvable_points == 0;
  return report;
}

}  // namespace netcbf
