#include "doctest.h"

#include <cmath>
#include <sstream>

#include "netcbf/analysis_bounds.hpp"
#include "netcbf/errors.hpp"
#include "netcbf/estimation.hpp"
#include "netcbf/norms.hpp"
#include "netcbf/scenarios.hpp"
#include "netcbf/sim_engine.hpp"

using namespace netcbf;

namespace {

SimConfig config(double horizon, double dt = 1e-3) {
  SimConfig c;
  c.horizon = horizon;
  c.dt = dt;
  return c;
}

double sup_distance(const std::vector<VectorXd>& a, const std::vector<VectorXd>& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, (a[k] - b[k]).norm());
  return d;
}

double sup_tracking(const Trajectory& t) {
  double d = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) d = std::max(d, (t.fast[k] - t.static_reference[k]).norm());
  return d;
}

Trajectory toy_dynamic(double eps, const ToyScalarOptions& o = {}) {
  const Scenario sc = make_toy_scalar(o);
  SimConfig c = config(10.0);
  c.epsilon = eps;
  c.x0 = sc.x0;
  return simulate_dynamic(sc.model, sc.spec, sc.disturbance, c);
}

}  // namespace

TEST_SUITE("sim_engine") {

TEST_CASE("step count") {
  CHECK(step_count(1.0, 1e-3) == 1000);
  CHECK(step_count(10.0, 1e-3) == 10000);
  CHECK(step_count(1.0005, 1e-3) == 1001);
}

TEST_CASE("Euler on xdot = -x") {
  SimConfig c = config(1.0);
  const Trajectory t = integrate_euler([](double, const VectorXd& x) -> VectorXd { return -x; },
                                       VectorXd::Ones(1), c);
  REQUIRE(t.size() == 1001);
  CHECK(std::abs(t.states.back()(0) - 0.36770) <= 1e-5);
  CHECK(t.states.back()(0) == doctest::Approx(std::pow(1.0 - 1e-3, 1000)).epsilon(1e-12));
  for (std::size_t k = 0; k < t.size(); ++k) CHECK(t.times[k] == doctest::Approx(k * 1e-3).epsilon(1e-15));
}

TEST_CASE("constant and unit-slope fields") {
  SimConfig c = config(2.0);
  const VectorXd x0 = (VectorXd(2) << 1.5, -2.0).finished();
  const Trajectory flat = integrate_euler([](double, const VectorXd& x) -> VectorXd { return VectorXd::Zero(x.size()); },
                                          x0, c);
  for (const auto& x : flat.states) CHECK(x == x0);
  const Trajectory ramp = integrate_euler([](double, const VectorXd& x) -> VectorXd { return VectorXd::Ones(x.size()); },
                                          x0, c);
  for (std::size_t k = 0; k < ramp.size(); ++k) {
    CHECK((ramp.states[k] - x0 - VectorXd::Constant(2, ramp.times[k])).norm() <= 1e-12);
  }
}

TEST_CASE("blowup and domain exit abort") {
  SimConfig c = config(1.0);
  CHECK_THROWS_AS(integrate_euler([](double t, const VectorXd& x) -> VectorXd {
                    return t > 0.5 ? VectorXd::Constant(x.size(), std::nan("")) : VectorXd::Zero(x.size());
                  },
                                  VectorXd::Zero(1), c),
                  NumericalBlowup);
  Box box{VectorXd::Constant(1, -1.0), VectorXd::Constant(1, 1.0)};
  CHECK_THROWS_AS(integrate_euler([](double, const VectorXd& x) -> VectorXd { return VectorXd::Constant(x.size(), 5.0); },
                                  VectorXd::Zero(1), c, &box),
                  DomainExit);
}

TEST_CASE("first-order step-size convergence") {
  auto rhs = [](double t, const VectorXd& x) -> VectorXd { return -x + VectorXd::Constant(1, std::sin(t)); };
  const double ref = integrate_euler(rhs, VectorXd::Ones(1), config(2.0, 1e-3 / 64)).states.back()(0);
  const double e1 = std::abs(integrate_euler(rhs, VectorXd::Ones(1), config(2.0, 1e-3)).states.back()(0) - ref);
  const double e2 = std::abs(integrate_euler(rhs, VectorXd::Ones(1), config(2.0, 5e-4)).states.back()(0) - ref);
  CHECK(e1 <= 1e-3);
  CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("determinism") {
  ToyScalarOptions o;
  const Trajectory a = toy_dynamic(0.02, o);
  const Trajectory b = toy_dynamic(0.02, o);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    REQUIRE(a.states[k] == b.states[k]);
    REQUIRE(a.fast[k] == b.fast[k]);
  }
  CHECK(trajectory_csv(a) == trajectory_csv(b));
}

TEST_CASE("static filter keeps the scalar toy safe") {
  // xdot = -x + u + w, h = x, alpha(s) = s, w = -2, x0 = 1.
  ToyScalarOptions o;
  o.offset = 0.0;
  o.alpha = 1.0;
  o.disturbance = -2.0;
  o.onset = 0.0;
  o.x0 = 1.0;
  const Scenario sc = make_toy_scalar(o);
  SimConfig c = config(10.0);
  c.x0 = sc.x0;
  const Trajectory t = simulate_static(sc.model, sc.spec, sc.disturbance, c);
  for (const auto& x : t.states) CHECK(x(0) >= -1e-6);
  // hdot + h >= 0 with equality once active gives x(t) = e^{-t} x0: never reaches the boundary.
  CHECK(t.states.back()(0) == doctest::Approx(std::pow(1.0 - 1e-3, 10000)).epsilon(1e-9));
  for (std::size_t k = 0; k < t.size(); ++k) CHECK(t.corrections[k] == t.static_reference[k]);
  CHECK(t.fast.empty());
}

TEST_CASE("dynamic run equals static run when the filter stays idle") {
  ToyScalarOptions o;
  o.disturbance = 0.0;
  const Scenario sc = make_toy_scalar(o);
  SimConfig c = config(5.0);
  c.x0 = VectorXd::Constant(1, 0.2);
  c.epsilon = 1e-4;
  const Trajectory stat = simulate_static(sc.model, sc.spec, sc.disturbance, c);
  const Trajectory dyn = simulate_dynamic(sc.model, sc.spec, sc.disturbance, c);
  CHECK(sup_distance(stat.states, dyn.states) <= 1e-9);
  CHECK_FALSE(dyn.warnings.empty());  // dt > eps/10
  for (auto a : dyn.active) CHECK(a == 0);
}

TEST_CASE("nominal run contracts") {
  MatrixXd a(2, 2);
  a << -2.0, 1.0, -1.0, -1.5;
  NetworkModel m(SubsystemLayout({2}, {1}), [a](const VectorXd& x) -> VectorXd { return a * x; },
                 {MatrixXd::Zero(2, 1)}, {[](const VectorXd&) -> VectorXd { return VectorXd::Zero(1); }},
                 Box{VectorXd::Constant(2, -5), VectorXd::Constant(2, 5)});
  const double c_f = log_norm(a, Norm::Two);
  REQUIRE(c_f < 0.0);
  SimConfig c = config(5.0);
  c.x0 = (VectorXd(2) << 1.0, -1.0).finished();
  const Trajectory ta = simulate_nominal(m, zero_disturbance(2), c);
  c.x0 = (VectorXd(2) << -0.5, 2.0).finished();
  const Trajectory tb = simulate_nominal(m, zero_disturbance(2), c);
  const double d0 = (ta.states[0] - tb.states[0]).norm();
  for (std::size_t k = 0; k < ta.size(); ++k) {
    CHECK((ta.states[k] - tb.states[k]).norm() <= std::exp(c_f * ta.times[k]) * d0 + 1e-9);
  }
}

TEST_CASE("O(eps) tracking with the exact estimator") {
  const double s2 = sup_tracking(toy_dynamic(0.02));
  const double s1 = sup_tracking(toy_dynamic(0.01));
  const double s05 = sup_tracking(toy_dynamic(0.005));
  CHECK(s1 / s2 >= 0.4);
  CHECK(s1 / s2 <= 0.6);
  CHECK(s05 / s1 >= 0.4);
  CHECK(s05 / s1 <= 0.6);
}

TEST_CASE("dynamic run approaches the static run as eps shrinks") {
  const Scenario sc = make_toy_scalar();
  SimConfig c = config(10.0);
  c.x0 = sc.x0;
  const Trajectory stat = simulate_static(sc.model, sc.spec, sc.disturbance, c);
  double prev = INFINITY;
  for (double eps : {0.04, 0.02, 0.01}) {
    const double d = sup_distance(toy_dynamic(eps).states, stat.states);
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("recorded steps satisfy the plant equation") {
  const Scenario sc = make_toy_scalar();
  const Trajectory t = toy_dynamic(0.02);
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const VectorXd fd = (t.states[k + 1] - t.states[k]) / t.dt;
    const VectorXd xdot = exact_derivative(sc.model, t.states[k], t.fast[k], sc.disturbance(t.times[k]));
    REQUIRE((fd - xdot).norm() <= 1e-9 * std::max(1.0, xdot.norm()));
  }
  CHECK(t.error_sup == 0.0);
}

TEST_CASE("trajectory csv layout") {
  const Trajectory t = toy_dynamic(0.05);
  std::istringstream in(trajectory_csv(t));
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,x_0,z_0,s_0,active,e_norm");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == t.size());

  const Scenario sc = make_toy_scalar();
  SimConfig c = config(1.0);
  c.x0 = sc.x0;
  std::istringstream nominal(trajectory_csv(simulate_nominal(sc.model, sc.disturbance, c)));
  std::getline(nominal, header);
  CHECK(header == "t,x_0");
}

TEST_CASE("shortest round-trip formatting") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e21, 0.0}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(0.5) == "0.5");
}

}
