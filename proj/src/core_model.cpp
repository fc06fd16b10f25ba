#include "netcbf/core_model.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "netcbf/errors.hpp"

namespace netcbf {

SubsystemLayout::SubsystemLayout(std::vector<Index> state_dims, std::vector<Index> input_dims)
    : state_dims_(std::move(state_dims)), input_dims_(std::move(input_dims)) {
  if (state_dims_.empty()) throw StructuralError("layout: at least one subsystem required");
  if (state_dims_.size() != input_dims_.size()) {
    throw StructuralError("layout: state_dims and input_dims differ in length");
  }
  for (std::size_t i = 0; i < state_dims_.size(); ++i) {
    if (state_dims_[i] <= 0 || input_dims_[i] <= 0) {
      throw StructuralError("layout: subsystem " + std::to_string(i) + " has a non-positive dimension");
    }
    state_offsets_.push_back(state_offsets_.back() + state_dims_[i]);
    input_offsets_.push_back(input_offsets_.back() + input_dims_[i]);
  }
}

void SubsystemLayout::require_state(const VectorXd& x, const char* what) const {
  if (x.size() != state_dim()) {
    throw StructuralError(std::string(what) + ": expected state of length " + std::to_string(state_dim()) +
                          ", got " + std::to_string(x.size()));
  }
}

void SubsystemLayout::require_input(const VectorXd& u, const char* what) const {
  if (u.size() != input_dim()) {
    throw StructuralError(std::string(what) + ": expected input of length " + std::to_string(input_dim()) +
                          ", got " + std::to_string(u.size()));
  }
}

VectorXd SubsystemLayout::state_block(const VectorXd& x, std::size_t i) const {
  return x.segment(state_offset(i), state_dim(i));
}

VectorXd SubsystemLayout::input_block(const VectorXd& u, std::size_t i) const {
  return u.segment(input_offset(i), input_dim(i));
}

std::vector<VectorXd> SubsystemLayout::split_states(const VectorXd& x) const {
  require_state(x, "split_states");
  std::vector<VectorXd> blocks;
  blocks.reserve(count());
  for (std::size_t i = 0; i < count(); ++i) blocks.push_back(state_block(x, i));
  return blocks;
}

VectorXd SubsystemLayout::stack_states(const std::vector<VectorXd>& blocks) const {
  if (blocks.size() != count()) throw StructuralError("stack_states: wrong number of blocks");
  VectorXd x(state_dim());
  for (std::size_t i = 0; i < count(); ++i) {
    if (blocks[i].size() != state_dim(i)) throw StructuralError("stack_states: block size mismatch");
    x.segment(state_offset(i), state_dim(i)) = blocks[i];
  }
  return x;
}

std::vector<VectorXd> SubsystemLayout::split_inputs(const VectorXd& u) const {
  require_input(u, "split_inputs");
  std::vector<VectorXd> blocks;
  blocks.reserve(count());
  for (std::size_t i = 0; i < count(); ++i) blocks.push_back(input_block(u, i));
  return blocks;
}

VectorXd SubsystemLayout::stack_inputs(const std::vector<VectorXd>& blocks) const {
  if (blocks.size() != count()) throw StructuralError("stack_inputs: wrong number of blocks");
  VectorXd u(input_dim());
  for (std::size_t i = 0; i < count(); ++i) {
    if (blocks[i].size() != input_dim(i)) throw StructuralError("stack_inputs: block size mismatch");
    u.segment(input_offset(i), input_dim(i)) = blocks[i];
  }
  return u;
}

bool Box::contains(const VectorXd& x, double excursion_fraction) const {
  if (x.size() != dim()) return false;
  for (Index k = 0; k < dim(); ++k) {
    const double slack = excursion_fraction * (upper(k) - lower(k));
    if (!(x(k) >= lower(k) - slack && x(k) <= upper(k) + slack)) return false;
  }
  return true;
}

VectorXd Box::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  VectorXd x(dim());
  for (Index k = 0; k < dim(); ++k) x(k) = lower(k) + unit(rng) * (upper(k) - lower(k));
  return x;
}

double Box::diameter(Norm norm) const { return vector_norm(upper - lower, norm); }

NetworkModel::NetworkModel(SubsystemLayout layout, VectorField coupling, std::vector<MatrixXd> input_blocks,
                           std::vector<LocalController> nominal, Box domain)
    : layout_(std::move(layout)),
      coupling_(std::move(coupling)),
      input_blocks_(std::move(input_blocks)),
      nominal_(std::move(nominal)),
      domain_(std::move(domain)) {
  if (!coupling_) throw StructuralError("model: coupling evaluator is empty");
  if (input_blocks_.size() != layout_.count() || nominal_.size() != layout_.count()) {
    throw StructuralError("model: need one input block and one nominal controller per subsystem");
  }
  for (std::size_t i = 0; i < layout_.count(); ++i) {
    const auto& b = input_blocks_[i];
    if (b.rows() != layout_.state_dim(i) || b.cols() != layout_.input_dim(i)) {
      throw StructuralError("model: input block " + std::to_string(i) + " is " + std::to_string(b.rows()) + "x" +
                            std::to_string(b.cols()) + ", layout requires " +
                            std::to_string(layout_.state_dim(i)) + "x" + std::to_string(layout_.input_dim(i)));
    }
    if (!nominal_[i]) throw StructuralError("model: nominal controller " + std::to_string(i) + " is empty");
  }
  if (domain_.lower.size() != layout_.state_dim() || domain_.upper.size() != layout_.state_dim()) {
    throw StructuralError("model: domain box dimension does not match the state");
  }
  if ((domain_.upper.array() < domain_.lower.array()).any()) {
    throw StructuralError("model: domain box has upper < lower");
  }
}

MatrixXd NetworkModel::input_matrix() const {
  MatrixXd b = MatrixXd::Zero(layout_.state_dim(), layout_.input_dim());
  for (std::size_t i = 0; i < layout_.count(); ++i) {
    b.block(layout_.state_offset(i), layout_.input_offset(i), layout_.state_dim(i), layout_.input_dim(i)) =
        input_blocks_[i];
  }
  return b;
}

VectorXd NetworkModel::coupling(const VectorXd& x) const {
  layout_.require_state(x, "coupling");
  VectorXd fx = coupling_(x);
  if (fx.size() != layout_.state_dim()) throw StructuralError("coupling: evaluator returned wrong length");
  return fx;
}

VectorXd NetworkModel::nominal_input(const VectorXd& x) const {
  layout_.require_state(x, "nominal_input");
  VectorXd u(layout_.input_dim());
  for (std::size_t i = 0; i < layout_.count(); ++i) {
    VectorXd ui = nominal_[i](layout_.state_block(x, i));
    if (ui.size() != layout_.input_dim(i)) throw StructuralError("nominal controller returned wrong length");
    u.segment(layout_.input_offset(i), layout_.input_dim(i)) = ui;
  }
  return u;
}

VectorXd NetworkModel::apply_input(const VectorXd& u) const {
  layout_.require_input(u, "apply_input");
  VectorXd out(layout_.state_dim());
  for (std::size_t i = 0; i < layout_.count(); ++i) {
    out.segment(layout_.state_offset(i), layout_.state_dim(i)) =
        input_blocks_[i] * u.segment(layout_.input_offset(i), layout_.input_dim(i));
  }
  return out;
}

VectorXd NetworkModel::nominal_closed_loop(const VectorXd& x) const {
  return coupling(x) + apply_input(nominal_input(x));
}

VectorXd NetworkModel::filtered_rhs(const VectorXd& x, const VectorXd& correction, const VectorXd& w) const {
  layout_.require_state(w, "filtered_rhs(w)");
  return nominal_closed_loop(x) + apply_input(correction) + w;
}

bool DisturbanceSignal::bound_holds(double horizon, double dt, Norm norm) const {
  const auto steps = static_cast<long>(std::ceil(horizon / dt - 1e-9));
  for (long k = 0; k <= steps; ++k) {
    if (vector_norm(evaluate(static_cast<double>(k) * dt), norm) > essential_bound) return false;
  }
  return true;
}

DisturbanceSignal zero_disturbance(Index n) {
  return {[n](double) { return VectorXd::Zero(n).eval(); }, 0.0};
}

DisturbanceSignal constant_disturbance(VectorXd value, Norm norm) {
  const double bound = vector_norm(value, norm);
  return {[value = std::move(value)](double) { return value; }, bound};
}

DisturbanceSignal step_disturbance(VectorXd value, double onset, Norm norm) {
  const double bound = vector_norm(value, norm);
  return {[value = std::move(value), onset](double t) -> VectorXd {
            if (t < onset) return VectorXd::Zero(value.size());
            return value;
          },
          bound};
}

}  // namespace netcbf
