#include "netcbf/analysis_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "netcbf/errors.hpp"

namespace netcbf {

std::vector<VectorXd> sample_domain(const Box& box, std::size_t count, std::mt19937_64& rng) {
  std::vector<VectorXd> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(box.sample(rng));
  return out;
}

MatrixXd finite_difference_jacobian(const VectorField& field, const VectorXd& x, double fd_scale) {
  const VectorXd f0 = field(x);
  MatrixXd jac(f0.size(), x.size());
  VectorXd probe = x;
  for (Index j = 0; j < x.size(); ++j) {
    const double h = fd_scale * std::max(1.0, std::abs(x(j)));
    probe(j) = x(j) + h;
    const VectorXd fp = field(probe);
    probe(j) = x(j) - h;
    const VectorXd fm = field(probe);
    probe(j) = x(j);
    jac.col(j) = (fp - fm) / (2.0 * h);
  }
  return jac;
}

LogNormEstimate estimate_cF(const NetworkModel& model, const std::vector<VectorXd>& samples, Norm norm,
                            double fd_scale) {
  if (samples.empty()) throw std::invalid_argument("estimate_cF: no samples");
  const VectorField closed_loop = [&model](const VectorXd& x) { return model.nominal_closed_loop(x); };
  std::vector<double> values;
  values.reserve(samples.size());
  for (const auto& x : samples) {
    const MatrixXd jac = finite_difference_jacobian(closed_loop, x, fd_scale);
    if (!jac.allFinite()) throw NumericalError("estimate_cF: non-finite Jacobian entry");
    values.push_back(log_norm(jac, norm));
  }
  LogNormEstimate est;
  est.samples = values.size();
  est.max = *std::max_element(values.begin(), values.end());
  std::sort(values.begin(), values.end());
  const auto idx = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(values.size()))) - 1;
  est.p95 = values[std::min(idx, values.size() - 1)];
  return est;
}

namespace {

std::optional<VectorXd> try_filter(const SafetySpec& spec, const NetworkModel& model, const VectorXd& x,
                                   const VectorXd& w) {
  try {
    return static_filter(spec, model, x, w).correction;
  } catch (const WellPosednessViolation&) {
    return std::nullopt;
  }
}

}  // namespace

double estimate_lipschitz_s(const SafetySpec& spec, const NetworkModel& model, const VectorXd& w,
                            std::mt19937_64& rng, Norm norm, const LipschitzOptions& options) {
  const Box& box = model.domain();
  const double radius = options.short_range_scale * box.diameter(norm);
  std::uniform_real_distribution<double> symmetric(-1.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  double best = 0.0;
  for (std::size_t k = 0; k < options.pairs; ++k) {
    // Pair k is short-range when the running share crosses an integer; prefixes of the
    // pair sequence are therefore identical across pair counts.
    const auto before = std::floor(static_cast<double>(k) * options.short_range_fraction);
    const auto after = std::floor(static_cast<double>(k + 1) * options.short_range_fraction);
    const VectorXd x = box.sample(rng);
    VectorXd y;
    if (after > before) {
      VectorXd dir(x.size());
      for (Index j = 0; j < dir.size(); ++j) dir(j) = symmetric(rng);
      const double dn = vector_norm(dir, norm);
      if (dn == 0.0) continue;
      y = x + dir * (radius * unit(rng) / dn);
    } else {
      y = box.sample(rng);
    }
    const double dist = vector_norm(x - y, norm);
    if (dist == 0.0) continue;
    const auto sx = try_filter(spec, model, x, w);
    const auto sy = try_filter(spec, model, y, w);
    if (!sx || !sy) continue;
    best = std::max(best, vector_norm(*sx - *sy, norm) / dist);
  }
  return best;
}

double estimate_ell_se(const SafetySpec& spec, const NetworkModel& model, const std::vector<VectorXd>& samples,
                       Norm norm) {
  spec.require_compatible(model);
  const auto& layout = model.layout();
  double best = 0.0;
  for (const auto& x : samples) {
    for (std::size_t i = 0; i < layout.count(); ++i) {
      if (!spec.constrained(i)) continue;
      const VectorXd xi = layout.state_block(x, i);
      const VectorXd d = eval_direction(spec.barrier(i), model.input_block(i), xi, i);
      const VectorXd g = spec.barrier(i).gradient(xi);
      // Rank-one block d g^T.
      const double block = norm == Norm::Two ? d.norm() * g.norm() : d.cwiseAbs().maxCoeff() * g.lpNorm<1>();
      best = std::max(best, block);
    }
  }
  return best;
}

double bound_E(double epsilon, double ell_s_x, double B_norm, double ell_s_e, double N_bar, double e_bar) {
  const double loop = epsilon * ell_s_x * B_norm;
  if (!(loop < 1.0)) {
    throw HypothesisNotMet("tracking bound requires 1/epsilon > ell_s_x ||B||; got epsilon ell_s_x ||B|| = " +
                           format_double(loop));
  }
  return (epsilon * ell_s_x * N_bar + ell_s_e * e_bar) / (1.0 - loop);
}

double sup_filtered_field(const Trajectory& traj, const NetworkModel& model, const DisturbanceSignal& w, Norm norm) {
  if (traj.static_reference.size() != traj.size()) {
    throw StructuralError("sup_filtered_field: trajectory has no static reference");
  }
  double sup = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const VectorXd field = model.filtered_rhs(traj.states[k], traj.static_reference[k], w(traj.times[k]));
    sup = std::max(sup, vector_norm(field, norm));
  }
  return sup;
}

namespace {

void finalize(BoundReport& report) {
  std::vector<double> slack(report.times.size());
  report.satisfied = true;
  report.first_violation_time.reset();
  for (std::size_t k = 0; k < report.times.size(); ++k) {
    slack[k] = report.bound[k] - report.empirical[k];
    if (!(report.empirical[k] <= report.bound[k]) && report.satisfied) {
      report.satisfied = false;
      report.first_violation_time = report.times[k];
    }
  }
  if (slack.empty()) return;
  report.min_slack = *std::min_element(slack.begin(), slack.end());
  const auto mid = slack.begin() + static_cast<std::ptrdiff_t>(slack.size() / 2);
  std::nth_element(slack.begin(), mid, slack.end());
  report.median_slack = *mid;
}

}  // namespace

BoundReport prop1_bound_curve(const Trajectory& run, const ConstantEstimates& c) {
  if (run.fast.size() != run.size() || run.static_reference.size() != run.size()) {
    throw StructuralError("prop1_bound_curve: needs a dynamic trajectory with fast states and static reference");
  }
  if (!(c.epsilon > 0.0)) throw std::invalid_argument("prop1_bound_curve: epsilon must be positive");
  const double lambda = c.lambda();
  if (!(lambda > 0.0)) {
    throw HypothesisNotMet("tracking bound requires lambda = 1/epsilon - ell_s_x ||B|| > 0; got " +
                           format_double(lambda));
  }
  const double e_bound = bound_E(c.epsilon, c.ell_s_x, c.B_norm, c.ell_s_e, c.N_bar, c.e_bar);

  BoundReport report;
  report.name = "tracking";
  report.times = run.times;
  report.empirical.reserve(run.size());
  report.bound.reserve(run.size());
  const double t0 = run.times.front();
  const double z0 = vector_norm(run.fast.front() - run.static_reference.front(), c.norm);
  for (std::size_t k = 0; k < run.size(); ++k) {
    report.empirical.push_back(vector_norm(run.fast[k] - run.static_reference[k], c.norm));
    report.bound.push_back(std::exp(-lambda * (run.times[k] - t0)) * z0 + e_bound);
  }
  finalize(report);
  return report;
}

namespace {

void require_same_grid(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size() || a.dt != b.dt) throw StructuralError("trajectories are on different grids");
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a.times[k] != b.times[k]) throw StructuralError("trajectories are on different grids");
  }
  if (a.static_reference.size() != a.size() || b.static_reference.size() != b.size()) {
    throw StructuralError("both trajectories need a recorded static reference");
  }
}

bool inactive(const Trajectory& a, const Trajectory& b, std::size_t k) {
  return (a.static_reference[k].array() == 0.0).all() && (b.static_reference[k].array() == 0.0).all();
}

}  // namespace

double active_time(const Trajectory& dynamic_run, const Trajectory& static_run, std::size_t begin,
                   std::size_t end) {
  require_same_grid(dynamic_run, static_run);
  end = std::min(end, dynamic_run.size());
  double total = 0.0;
  for (std::size_t k = begin; k < end; ++k) {
    if (!inactive(dynamic_run, static_run, k)) total += dynamic_run.dt;
  }
  return total;
}

BoundReport active_time_and_thm1_curve(const Trajectory& dyn, const Trajectory& stat, const ConstantEstimates& c) {
  require_same_grid(dyn, stat);
  if (dyn.fast.size() != dyn.size()) throw StructuralError("deviation bound needs the dynamic run's fast states");
  if (!(c.c_F < 0.0)) {
    throw HypothesisNotMet("deviation bound requires c_F < 0 (contractive nominal dynamics); estimated c_F = " +
                           format_double(c.c_F));
  }
  const double lambda = c.lambda();
  if (!(lambda > 0.0)) {
    throw HypothesisNotMet("deviation bound requires lambda = 1/epsilon - ell_s_x ||B|| > 0; got " +
                           format_double(lambda));
  }
  const double e_bound = bound_E(c.epsilon, c.ell_s_x, c.B_norm, c.ell_s_e, c.N_bar, c.e_bar);
  const double gain = c.ell_s_x * c.B_norm;
  const double t0 = dyn.times.front();
  const double x0 = vector_norm(dyn.states.front() - stat.states.front(), c.norm);
  const double z0 = vector_norm(dyn.fast.front() - dyn.static_reference.front(), c.norm);
  const double offset = c.B_norm * (z0 / lambda + e_bound / std::abs(c.c_F));

  BoundReport report;
  report.name = "deviation";
  report.times = dyn.times;
  double t_active = 0.0;
  for (std::size_t k = 0; k < dyn.size(); ++k) {
    const double t = dyn.times[k] - t0;
    report.active_time.push_back(t_active);
    report.empirical.push_back(vector_norm(dyn.states[k] - stat.states[k], c.norm));
    report.bound.push_back(std::exp(c.c_F * t + gain * t_active) * x0 + std::exp(gain * t_active) * offset);
    if (!inactive(dyn, stat, k)) t_active += dyn.dt;
  }
  finalize(report);
  return report;
}

bool VerificationResult::all_satisfied() const {
  return hypothesis_failures.empty() && tracking && tracking->satisfied && deviation && deviation->satisfied;
}

VerificationResult verify_bounds(const Scenario& scenario, const VerifySettings& settings) {
  SimConfig sim = settings.sim;
  sim.x0 = scenario.x0;
  const Norm norm = sim.norm;

  VerificationResult result;
  const Trajectory stat = simulate_static(scenario.model, scenario.spec, scenario.disturbance, sim);
  const Trajectory dyn = simulate_dynamic(scenario.model, scenario.spec, scenario.disturbance, sim);
  result.warnings = dyn.warnings;

  std::mt19937_64 rng(settings.seed);
  const auto samples = sample_domain(scenario.model.domain(), settings.samples, rng);
  const VectorXd w_snapshot = scenario.disturbance(sim.horizon);

  ConstantEstimates& c = result.constants;
  c.norm = norm;
  c.epsilon = sim.epsilon;
  c.seed = settings.seed;
  c.sample_count = samples.size();
  c.pair_count = settings.lipschitz.pairs;
  const auto cf = estimate_cF(scenario.model, samples, norm);
  c.c_F = cf.max;
  c.c_F_p95 = cf.p95;
  c.ell_s_x = estimate_lipschitz_s(scenario.spec, scenario.model, w_snapshot, rng, norm, settings.lipschitz);
  c.ell_s_e = estimate_ell_se(scenario.spec, scenario.model, samples, norm);
  c.B_norm = induced_norm(scenario.model.input_matrix(), norm);
  c.N_bar = sup_filtered_field(dyn, scenario.model, scenario.disturbance, norm);
  c.e_bar = dyn.error_sup;

  try {
    result.tracking = prop1_bound_curve(dyn, c);
  } catch (const HypothesisNotMet& e) {
    result.hypothesis_failures.push_back(std::string("tracking: ") + e.what());
  }
  try {
    result.deviation = active_time_and_thm1_curve(dyn, stat, c);
  } catch (const HypothesisNotMet& e) {
    result.hypothesis_failures.push_back(std::string("deviation: ") + e.what());
  }
  return result;
}

}  // namespace netcbf
