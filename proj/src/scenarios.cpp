#include "netcbf/scenarios.hpp"

#include <string>
#include <utility>

#include "netcbf/errors.hpp"

namespace netcbf {

Scenario make_toy_scalar(const ToyScalarOptions& o) {
  SubsystemLayout layout({1}, {1});
  const double decay = o.decay;
  auto coupling = [decay](const VectorXd& x) -> VectorXd { return -decay * x; };
  std::vector<MatrixXd> blocks{MatrixXd::Ones(1, 1)};
  std::vector<LocalController> nominal{[](const VectorXd&) { return VectorXd::Zero(1).eval(); }};
  Box box{VectorXd::Constant(1, -o.box_half_width), VectorXd::Constant(1, o.box_half_width)};
  NetworkModel model(std::move(layout), std::move(coupling), std::move(blocks), std::move(nominal), std::move(box));
  SafetySpec spec({affine_barrier(VectorXd::Ones(1), o.offset, o.alpha)});
  return Scenario{"toy-scalar", std::move(model), std::move(spec),
                  step_disturbance(VectorXd::Constant(1, o.disturbance), o.onset), VectorXd::Constant(1, o.x0)};
}

Scenario make_custom_network(const CustomNetworkOptions& o) {
  SubsystemLayout layout(o.state_dims, o.input_dims);
  const Index n = layout.state_dim();
  if (o.coupling.rows() != n || o.coupling.cols() != n) {
    throw StructuralError("custom network: coupling matrix must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  const VectorXd drift = o.drift.size() == 0 ? VectorXd::Zero(n) : o.drift;
  layout.require_state(drift, "custom network drift");
  auto coupling = [a = o.coupling, drift](const VectorXd& x) -> VectorXd { return a * x + drift; };

  std::vector<LocalController> nominal;
  for (std::size_t i = 0; i < layout.count(); ++i) {
    MatrixXd k = (i < o.gains.size() && o.gains[i].size() != 0) ? o.gains[i]
                                                                 : MatrixXd::Zero(layout.input_dim(i), layout.state_dim(i));
    if (k.rows() != layout.input_dim(i) || k.cols() != layout.state_dim(i)) {
      throw StructuralError("custom network: gain " + std::to_string(i) + " has wrong shape");
    }
    nominal.emplace_back([k](const VectorXd& xi) -> VectorXd { return k * xi; });
  }

  if (o.barriers.size() != layout.count()) {
    throw StructuralError("custom network: need one barrier entry (or null) per subsystem");
  }
  std::vector<std::optional<BarrierFunction>> barriers;
  for (std::size_t i = 0; i < layout.count(); ++i) {
    if (!o.barriers[i]) {
      barriers.emplace_back(std::nullopt);
      continue;
    }
    if (o.barriers[i]->normal.size() != layout.state_dim(i)) {
      throw StructuralError("custom network: barrier " + std::to_string(i) + " normal has wrong length");
    }
    barriers.emplace_back(affine_barrier(o.barriers[i]->normal, o.barriers[i]->offset, o.barriers[i]->alpha));
  }

  NetworkModel model(layout, std::move(coupling), o.input_blocks, std::move(nominal), o.domain);
  const VectorXd w = o.disturbance.size() == 0 ? VectorXd::Zero(n) : o.disturbance;
  layout.require_state(w, "custom network disturbance");
  layout.require_state(o.x0, "custom network x0");
  return Scenario{"custom-network", std::move(model), SafetySpec(std::move(barriers)), step_disturbance(w, o.onset),
                  o.x0};
}

}  // namespace netcbf
