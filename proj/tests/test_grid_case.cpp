#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "netcbf/grid_case.hpp"
#include "netcbf/safety_filter.hpp"
#include "netcbf/sim_engine.hpp"
#include "support.hpp"

using namespace netcbf;
using namespace netcbf::grid;
using netcbf::testing::uniform;

namespace {

// Bus, M, D, tau, R as published.
const double kTable[14][5] = {
    {1, 2.5, 1.2, 0, 0},      {2, 3.0, 1.0, 0.12, 0.05}, {3, 2.8, 1.5, 0.12, 0.07}, {4, 2.2, 1.1, 0, 0},
    {5, 3.5, 1.3, 0, 0},      {6, 2.0, 0.9, 0.8, 0.03},  {7, 2.7, 1.4, 0, 0},       {8, 3.2, 1.6, 0.8, 0.09},
    {9, 2.9, 1.2, 0, 0},      {10, 2.6, 1.1, 0, 0},      {11, 2.4, 1.0, 0, 0},      {12, 3.1, 1.3, 0, 0},
    {13, 2.3, 1.2, 0, 0},     {14, 2.8, 1.1, 0, 0}};

GridParams two_bus() {
  GridParams p;
  p.buses = {{1, 1.0, 1.0, 0.0, 0.0}, {2, 1.0, 1.0, 0.0, 0.0}};
  p.lines = {{1, 2, 0.2}};
  return p;
}

VectorXd random_state(const GridCase& g, std::mt19937_64& rng) {
  VectorXd x(g.model.layout().state_dim());
  for (Index k = 0; k < x.size(); ++k) x(k) = uniform(rng, g.model.domain().lower(k), g.model.domain().upper(k));
  return x;
}

// Swing right-hand side for omega_n written directly from the line list.
double omega_rate(const GridCase& g, const VectorXd& x, std::size_t n) {
  const auto& bus = g.params.buses[n];
  double p = 0.0;
  for (const auto& line : g.params.lines) {
    const auto a = static_cast<std::size_t>(line.from - 1), b = static_cast<std::size_t>(line.to - 1);
    const double flow = (x(g.theta_index[a]) - x(g.theta_index[b])) / line.reactance;
    if (a == n) p += flow;
    if (b == n) p -= flow;
  }
  const double pm = g.pm_index[n] ? x(*g.pm_index[n]) : 0.0;
  return (-bus.damping * x(g.omega_index[n]) + pm - p) / bus.inertia;
}

SimConfig grid_sim(const GridCase& g, double horizon = 10.0) {
  SimConfig c;
  c.horizon = horizon;
  c.x0 = g.x0;
  return c;
}

}  // namespace

TEST_SUITE("grid_case") {

TEST_CASE("dc power injection") {
  const GridParams p = two_bus();
  CHECK(dc_power_injection(p, VectorXd::Zero(2)).isZero(0.0));
  CHECK(dc_power_injection(p, VectorXd::Constant(2, 0.37)).norm() <= 1e-15);
  const VectorXd inj = dc_power_injection(p, (VectorXd(2) << 0.1, 0.0).finished());
  CHECK(inj(0) == doctest::Approx(0.5));
  CHECK(inj(1) == doctest::Approx(-0.5));

  const GridCase g = build_ieee14();
  const MatrixXd lap = susceptance_laplacian(g.params);
  CHECK((lap - lap.transpose()).norm() == 0.0);
  CHECK((lap * VectorXd::Ones(14)).norm() <= 1e-12);
}

TEST_CASE("case dimensions and parameter table") {
  const GridCase g = build_ieee14();
  CHECK(g.model.layout().state_dim() == 32);
  CHECK(g.model.layout().count() == 14);
  CHECK(g.model.layout().input_dim() == 14);
  CHECK(g.params.lines.size() == 20);
  CHECK(g.params.generators == std::vector<int>{2, 3, 6, 8});
  for (std::size_t n = 0; n < 14; ++n) {
    const BusParams& b = g.params.buses[n];
    CHECK(b.id == static_cast<int>(kTable[n][0]));
    CHECK(b.inertia == kTable[n][1]);
    CHECK(b.damping == kTable[n][2]);
    CHECK(b.turbine_time_constant == kTable[n][3]);
    CHECK(b.droop == kTable[n][4]);
    CHECK(g.pm_index[n].has_value() == (kTable[n][3] > 0.0));
  }
}

TEST_CASE("parameter validation") {
  GridOptions o;
  o.generators = {1, 2, 3, 6, 8};  // bus 1 has tau = 0
  CHECK_THROWS_AS(build_ieee14(o), std::invalid_argument);
}

TEST_CASE("coupling matches the swing equations") {
  const GridCase g = build_ieee14();
  std::mt19937_64 rng(14);
  for (int k = 0; k < 200; ++k) {
    const VectorXd x = random_state(g, rng);
    const VectorXd f = g.model.nominal_closed_loop(x);
    for (std::size_t n = 0; n < 14; ++n) {
      CHECK(f(g.theta_index[n]) == x(g.omega_index[n]));
      CHECK(f(g.omega_index[n]) == doctest::Approx(omega_rate(g, x, n)).epsilon(1e-12));
      if (g.pm_index[n]) {
        const auto& bus = g.params.buses[n];
        CHECK(f(*g.pm_index[n]) ==
              doctest::Approx((-x(*g.pm_index[n]) - bus.droop * x(g.omega_index[n])) / bus.turbine_time_constant));
      }
    }
  }
}

TEST_CASE("equilibrium is stationary before the step") {
  const GridCase g = build_ieee14();
  CHECK(g.model.coupling(g.x0).isZero(0.0));
  GridOptions o;
  o.disturbance_magnitude = 0.0;
  const GridCase quiet = build_ieee14(o);
  const Trajectory t = simulate_nominal(quiet.model, quiet.disturbance, grid_sim(quiet, 2.0));
  for (const auto& x : t.states) CHECK(x.isZero(0.0));

  const Trajectory pre = simulate_nominal(g.model, g.disturbance, grid_sim(g, 1.0));
  for (const auto& x : pre.states) CHECK(x.isZero(0.0));
}

TEST_CASE("angle shift leaves frequencies unchanged") {
  const GridCase g = build_ieee14();
  SimConfig c = grid_sim(g, 3.0);
  const Trajectory a = simulate_nominal(g.model, g.disturbance, c);
  for (Index idx : g.theta_index) c.x0(idx) += 0.75;
  const Trajectory b = simulate_nominal(g.model, g.disturbance, c);
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (Index idx : g.omega_index) REQUIRE(std::abs(a.states[k](idx) - b.states[k](idx)) <= 1e-12);
  }
}

TEST_CASE("generic filter equals the bus formula") {
  const GridCase g = build_ieee14();
  std::mt19937_64 rng(15);
  const double floor_dev = g.params.nadir_hz - g.params.nominal_hz;
  for (int k = 0; k < 1000; ++k) {
    const VectorXd x = random_state(g, rng);
    const VectorXd w = netcbf::testing::random_vector(rng, x.size(), 3.0);
    const VectorXd s = static_filter(g.spec, g.model, x, w).correction;
    for (std::size_t n = 0; n < 14; ++n) {
      const double m = g.params.buses[n].inertia;
      const double rate = g.model.nominal_closed_loop(x)(g.omega_index[n]) + w(g.omega_index[n]);
      const double paper = std::max(0.0, -m * rate - m * g.params.alpha * (x(g.omega_index[n]) - floor_dev));
      REQUIRE(std::abs(s(static_cast<Index>(n)) - paper) <= 1e-12 * std::max(1.0, paper));
    }
  }
}

TEST_CASE("frequency barrier examples") {
  const GridCase g = build_ieee14();
  const FilterEvaluation at_rest = static_filter(g.spec, g.model, g.x0, VectorXd::Zero(32));
  for (Index n = 0; n < 14; ++n) CHECK(at_rest.eta(n) == doctest::Approx(10.0 * 0.5));
  CHECK_FALSE(at_rest.any_active());

  // omega_1 = -0.5 with zero rate: tangent to the boundary.
  VectorXd x = VectorXd::Zero(32);
  x(g.omega_index[0]) = -0.5;
  VectorXd w = VectorXd::Zero(32);
  w(g.omega_index[0]) = -g.model.nominal_closed_loop(x)(g.omega_index[0]);
  const FilterEvaluation tangent = static_filter(g.spec, g.model, x, w);
  CHECK(std::abs(tangent.eta(0)) <= 1e-15);
  CHECK(tangent.correction(0) == 0.0);

  std::mt19937_64 rng(16);
  std::vector<VectorXd> samples;
  for (int k = 0; k < 200; ++k) samples.push_back(random_state(g, rng));
  const WellPosednessReport wp = check_wellposed(g.spec, g.model, samples, VectorXd::Zero(32), 1.0);
  CHECK(wp.pass);
}

TEST_CASE("violation metric") {
  const GridCase g = build_ieee14();
  Trajectory t;
  t.dt = 1e-3;
  for (int k = 0; k < 3; ++k) {
    t.times.push_back(k * 1e-3);
    t.states.push_back(VectorXd::Zero(32));
  }
  t.states[1](g.omega_index[2]) = 59.3 - 60.0;
  const ViolationSeries v = violation_metric(t, g);
  CHECK(v.violation_hz[0] == 0.0);
  CHECK(v.violation_hz[1] == doctest::Approx(0.2));
  CHECK(v.max_violation == doctest::Approx(0.2));
  CHECK(v.max_time == doctest::Approx(1e-3));
  CHECK(v.support_duration == doctest::Approx(1e-3));
}

TEST_CASE("unfiltered baseline violates, static filter does not") {
  const GridCase g = build_ieee14();
  const Trajectory nominal = simulate_nominal(g.model, g.disturbance, grid_sim(g));
  CHECK(violation_metric(nominal, g).max_violation > 0.0);
  const Trajectory stat = simulate_static(g.model, g.spec, g.disturbance, grid_sim(g));
  CHECK(violation_metric(stat, g).max_violation <= 1e-3);
}

TEST_CASE("log spacing") {
  const auto eps = log_spaced(1e-2, 1.0, 12);
  REQUIRE(eps.size() == 12);
  CHECK(eps.front() == 1e-2);
  CHECK(eps.back() == 1.0);
  for (std::size_t k = 1; k < eps.size(); ++k) {
    CHECK(eps[k] / eps[k - 1] == doctest::Approx(std::pow(100.0, 1.0 / 11.0)));
  }
  CHECK(log_spaced(0.1, 0.1, 1) == std::vector<double>{0.1});
  CHECK_THROWS(log_spaced(0.0, 1.0, 3));
}

TEST_CASE("sweep flags under-resolved cells and keeps going") {
  const GridCase g = build_ieee14();
  SimConfig base = grid_sim(g, 3.0);
  base.estimator.kind = EstimatorKind::Dirty;
  const SweepResult r = epsilon_sweep(g, {0.005, 0.05, 0.5}, base, 2);
  REQUIRE(r.cells.size() == 3);
  CHECK_FALSE(r.cells[0].ok);
  CHECK_FALSE(r.cells[0].error.empty());
  CHECK(r.cells[1].ok);
  CHECK(r.cells[2].ok);
  CHECK(r.succeeded() == 2);
  CHECK(r.cells[2].violation.max_violation >= r.cells[1].violation.max_violation);

  // A single-cell sweep reproduces the stand-alone run.
  const SweepResult one = epsilon_sweep(g, {0.5}, base, 1);
  SimConfig c = base;
  c.epsilon = 0.5;
  const ViolationSeries direct = violation_metric(simulate_dynamic(g.model, g.spec, g.disturbance, c), g);
  CHECK(one.cells[0].violation.violation_hz == direct.violation_hz);

  const std::string csv = heatmap_csv(r, 100);
  CHECK(csv.rfind("eps,t,violation_hz\n", 0) == 0);
}

}
