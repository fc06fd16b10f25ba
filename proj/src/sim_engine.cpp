#include "netcbf/sim_engine.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "netcbf/errors.hpp"
#include "netcbf/estimation.hpp"

namespace netcbf {

namespace {

void validate(const SimConfig& config) {
  if (!(config.dt > 0.0)) throw std::invalid_argument("sim: dt must be positive");
  if (!(config.horizon >= config.dt)) throw std::invalid_argument("sim: horizon must be at least dt");
}

void check_state(const VectorXd& x, std::size_t step, const SimConfig& config, const Box* domain) {
  if (!x.allFinite()) {
    throw NumericalBlowup(step, "non-finite state at step " + std::to_string(step));
  }
  if (config.check_domain && domain != nullptr && !domain->contains(x, config.domain_excursion)) {
    Index worst = 0;
    double excess = 0.0;
    for (Index k = 0; k < x.size(); ++k) {
      const double width = domain->upper(k) - domain->lower(k);
      const double out = std::max(domain->lower(k) - x(k), x(k) - domain->upper(k)) / (width > 0 ? width : 1.0);
      if (out > excess) {
        excess = out;
        worst = k;
      }
    }
    throw DomainExit(step, "state left the domain box at step " + std::to_string(step) + ": coordinate " +
                               std::to_string(worst) + " = " + std::to_string(x(worst)) + " is " +
                               std::to_string(100.0 * excess) + "% of the box width outside");
  }
}

bool nonzero(const VectorXd& v) { return (v.array() != 0.0).any(); }

Trajectory make_trajectory(RunKind kind, const SimConfig& config, std::size_t samples) {
  Trajectory t;
  t.kind = kind;
  t.dt = config.dt;
  t.times.reserve(samples);
  t.states.reserve(samples);
  return t;
}

}  // namespace

std::size_t step_count(double horizon, double dt) {
  return static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
}

Trajectory integrate_euler(const TimeVaryingField& rhs, const VectorXd& x0, const SimConfig& config,
                           const Box* domain) {
  validate(config);
  const std::size_t steps = step_count(config.horizon, config.dt);
  Trajectory traj = make_trajectory(RunKind::Nominal, config, steps + 1);
  VectorXd x = x0;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * config.dt;
    check_state(x, k, config, domain);
    traj.times.push_back(t);
    traj.states.push_back(x);
    if (k == steps) break;
    x += config.dt * rhs(t, x);
  }
  return traj;
}

Trajectory simulate_nominal(const NetworkModel& model, const DisturbanceSignal& w, const SimConfig& config) {
  model.layout().require_state(config.x0, "simulate_nominal(x0)");
  auto rhs = [&](double t, const VectorXd& x) -> VectorXd { return model.nominal_closed_loop(x) + w(t); };
  return integrate_euler(rhs, config.x0, config, &model.domain());
}

Trajectory simulate_static(const NetworkModel& model, const SafetySpec& spec, const DisturbanceSignal& w,
                           const SimConfig& config) {
  validate(config);
  model.layout().require_state(config.x0, "simulate_static(x0)");
  spec.require_compatible(model);
  const std::size_t steps = step_count(config.horizon, config.dt);
  Trajectory traj = make_trajectory(RunKind::Static, config, steps + 1);
  VectorXd x = config.x0;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * config.dt;
    check_state(x, k, config, &model.domain());
    const VectorXd wk = w(t);
    FilterEvaluation filter = static_filter(spec, model, x, wk);
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.active.push_back(nonzero(filter.correction) ? 1 : 0);
    traj.corrections.push_back(filter.correction);
    traj.static_reference.push_back(filter.correction);
    if (k == steps) break;
    x += config.dt * model.filtered_rhs(x, filter.correction, wk);
  }
  return traj;
}

Trajectory simulate_dynamic(const NetworkModel& model, const SafetySpec& spec, const DisturbanceSignal& w,
                            const SimConfig& config) {
  validate(config);
  if (!(config.epsilon > 0.0)) throw std::invalid_argument("sim: epsilon must be positive");
  const auto& layout = model.layout();
  layout.require_state(config.x0, "simulate_dynamic(x0)");
  spec.require_compatible(model);
  const auto& bias = config.estimator.bias;
  if (bias.size() != 0) layout.require_state(bias, "simulate_dynamic(bias)");

  const std::size_t steps = step_count(config.horizon, config.dt);
  Trajectory traj = make_trajectory(RunKind::Dynamic, config, steps + 1);
  if (config.dt > config.epsilon / 10.0) {
    traj.warnings.push_back("dt = " + format_double(config.dt) + " exceeds epsilon/10 = " +
                            format_double(config.epsilon / 10.0) + "; fast dynamics are under-resolved");
  }

  const bool dirty = config.estimator.kind == EstimatorKind::Dirty;
  if (dirty && config.dt > config.estimator.tau_d) {
    traj.warnings.push_back("dt exceeds tau_d; dirty-derivative estimate is under-resolved");
  }

  std::vector<DirtyDerivative> estimators;
  if (dirty) {
    for (std::size_t i = 0; i < layout.count(); ++i) {
      estimators.emplace_back(layout.state_block(config.x0, i), config.estimator.tau_d);
    }
  }

  VectorXd x = config.x0;
  VectorXd z = config.z0.size() == 0 ? VectorXd::Zero(layout.input_dim()) : config.z0;
  layout.require_input(z, "simulate_dynamic(z0)");
  EstimateRecord record;
  record.error_norms.reserve(steps + 1);
  VectorXd estimate(layout.state_dim());

  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * config.dt;
    check_state(x, k, config, &model.domain());
    if (!z.allFinite()) throw NumericalBlowup(k, "non-finite fast state at step " + std::to_string(k));
    const VectorXd wk = w(t);
    const VectorXd xdot = exact_derivative(model, x, z, wk);
    const bool last = k == steps;

    if (dirty) {
      for (std::size_t i = 0; i < layout.count(); ++i) {
        const VectorXd xi = layout.state_block(x, i);
        estimate.segment(layout.state_offset(i), layout.state_dim(i)) =
            last ? estimators[i].peek(xi) : estimators[i].step(xi, config.dt);
      }
    } else {
      estimate = xdot;
    }
    if (bias.size() != 0) estimate += bias;
    record_error(estimate, xdot, record, config.norm);

    const VectorXd reference = static_filter(spec, model, x, wk).correction;
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.fast.push_back(z);
    traj.corrections.push_back(z);
    traj.static_reference.push_back(reference);
    traj.active.push_back(nonzero(reference) ? 1 : 0);
    if (last) break;

    const VectorXd target = dynamic_filter_targets(spec, model, x, z, estimate);
    x += config.dt * xdot;
    z += (config.dt / config.epsilon) * (target - z);
  }
  traj.error_norms = std::move(record.error_norms);
  traj.error_sup = record.error_sup;
  return traj;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  const bool has_fast = !traj.fast.empty();
  const bool has_reference = !traj.static_reference.empty();
  const Index n = traj.states.empty() ? 0 : traj.states.front().size();
  const Index m = has_reference ? traj.static_reference.front().size() : 0;

  out << 't';
  for (Index j = 0; j < n; ++j) out << ",x_" << j;
  if (has_fast) {
    for (Index j = 0; j < m; ++j) out << ",z_" << j;
  }
  if (has_reference) {
    for (Index j = 0; j < m; ++j) out << ",s_" << j;
    out << ",active";
  }
  if (has_fast) out << ",e_norm";
  out << '\n';

  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << format_double(traj.times[k]);
    for (Index j = 0; j < n; ++j) out << ',' << format_double(traj.states[k](j));
    if (has_fast) {
      for (Index j = 0; j < m; ++j) out << ',' << format_double(traj.fast[k](j));
    }
    if (has_reference) {
      for (Index j = 0; j < m; ++j) out << ',' << format_double(traj.static_reference[k](j));
      out << ',' << static_cast<int>(traj.active[k]);
    }
    if (has_fast) out << ',' << format_double(traj.error_norms[k]);
    out << '\n';
  }
}

std::string trajectory_csv(const Trajectory& trajectory) {
  std::ostringstream out;
  write_trajectory_csv(trajectory, out);
  return out.str();
}

}  // namespace netcbf
