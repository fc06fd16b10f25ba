#include "doctest.h"

#include <cmath>
#include <random>

#include "netcbf/errors.hpp"
#include "netcbf/safety_filter.hpp"
#include "support.hpp"

using namespace netcbf;
using namespace netcbf::testing;

namespace {

// xdot = f(x) + u + w on one scalar subsystem, h = x + offset, alpha(s) = gain s.
NetworkModel scalar_model(double decay = 0.0, double b = 1.0) {
  return NetworkModel(SubsystemLayout({1}, {1}), [decay](const VectorXd& x) -> VectorXd { return -decay * x; },
                      {MatrixXd::Constant(1, 1, b)}, {[](const VectorXd&) -> VectorXd { return VectorXd::Zero(1); }},
                      Box{VectorXd::Constant(1, -3), VectorXd::Constant(1, 3)});
}

SafetySpec scalar_spec(double offset, double gain, double grad = 1.0) {
  return SafetySpec({affine_barrier(VectorXd::Constant(1, grad), offset, gain)});
}

VectorXd scalar(double v) { return VectorXd::Constant(1, v); }

}  // namespace

TEST_SUITE("safety_filter") {

TEST_CASE("eta for the scalar examples") {
  const NetworkModel m = scalar_model();
  CHECK(eval_eta(scalar_spec(0.0, 1.0), m, scalar(0.3), scalar(0.0))(0) == doctest::Approx(0.3));
  CHECK(eval_eta(scalar_spec(0.0, 1.0), m, scalar(0.0), scalar(0.0))(0) == 0.0);
}

TEST_CASE("direction examples") {
  CHECK(eval_direction(affine_barrier(scalar(2.0), 0.0, 1.0), MatrixXd::Ones(1, 1), scalar(0.0))(0) ==
        doctest::Approx(0.5));
  CHECK_THROWS_AS(eval_direction(affine_barrier(VectorXd::Zero(2), 0.0, 1.0), MatrixXd::Identity(2, 2),
                                 VectorXd::Zero(2)),
                  WellPosednessViolation);
}

TEST_CASE("direction identity on random blocks") {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 1000; ++k) {
    const Index n = pick(rng, 1, 3);
    const Index mi = pick(rng, 1, 2);
    MatrixXd b;
    VectorXd c;
    do {
      b = random_matrix(rng, n, mi);
      c = random_vector(rng, n);
    } while ((b.transpose() * c).norm() < 1e-3);
    const VectorXd d = eval_direction(affine_barrier(c, 0.0, 1.0), b, VectorXd::Zero(n));
    CHECK((b.transpose() * c).dot(d) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("static filter scalar examples") {
  const NetworkModel m = scalar_model();
  // eta = h = x + offset with F = 0, w = 0.
  const FilterEvaluation active = static_filter(scalar_spec(0.0, 1.0), m, scalar(-1.0), scalar(0.0));
  CHECK(active.eta(0) == -1.0);
  CHECK(active.correction(0) == doctest::Approx(1.0));
  CHECK(active.active[0]);
  const FilterEvaluation idle = static_filter(scalar_spec(0.0, 1.0), m, scalar(0.7), scalar(0.0));
  CHECK(idle.correction(0) == 0.0);
  CHECK_FALSE(idle.any_active());
}

TEST_CASE("qp oracle scalar example and inactive case") {
  const NetworkModel m = scalar_model();
  CHECK(std::abs(qp_oracle(scalar_spec(0.0, 1.0), m, scalar(-1.0), scalar(0.0))(0) - 1.0) <= 1e-10);
  CHECK(qp_oracle(scalar_spec(0.0, 1.0), m, scalar(0.4), scalar(0.0)).norm() <= 1e-10);
  // B = 0 with eta < 0: no feasible correction.
  CHECK_THROWS_AS(qp_oracle(scalar_spec(0.0, 1.0), scalar_model(0.0, 0.0), scalar(-1.0), scalar(0.0)), Infeasible);
}

TEST_CASE("closed form matches both oracles on random instances") {
  std::mt19937_64 rng(1234);
  int active_seen = 0;
  int inactive_seen = 0;
  for (int k = 0; k < 1000; ++k) {
    const RandomInstance r = random_instance(rng);
    const NetworkModel m = r.model();
    const SafetySpec spec = r.spec();
    const FilterEvaluation ev = static_filter(spec, m, r.x, r.w);
    const VectorXd pgd = qp_oracle(spec, m, r.x, r.w);
    const auto [g, rhs] = stacked_qp_constraints(spec, m, r.x, r.w);
    const VectorXd kkt = g.rows() == 0 ? VectorXd::Zero(r.layout.input_dim()) : active_set_qp(g, rhs);
    REQUIRE((ev.correction - pgd).norm() <= 1e-8);
    REQUIRE((ev.correction - kkt).norm() <= 1e-8);
    for (std::size_t i = 0; i < r.layout.count(); ++i) (ev.active[i] ? active_seen : inactive_seen)++;
  }
  CHECK(active_seen > 200);
  CHECK(inactive_seen > 200);
}

TEST_CASE("KKT certificate, span and minimality") {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 500; ++k) {
    const RandomInstance r = random_instance(rng, 4, 3, 2, false);
    const NetworkModel m = r.model();
    const SafetySpec spec = r.spec();
    const FilterEvaluation ev = static_filter(spec, m, r.x, r.w);
    const VectorXd fx = m.nominal_closed_loop(r.x);
    for (std::size_t i = 0; i < r.layout.count(); ++i) {
      const VectorXd si = r.layout.input_block(ev.correction, i);
      const VectorXd c = *r.normal[i];
      const VectorXd gi = r.B[i].transpose() * c;
      const double h = c.dot(r.layout.state_block(r.x, i)) + r.offset[i];
      const double lhs = c.dot(r.layout.state_block(fx, i) + r.B[i] * si + r.layout.state_block(r.w, i)) +
                         r.gain[i] * h;
      if (!ev.active[i]) {
        CHECK(si.isZero(0.0));
        CHECK(lhs >= 0.0);
        continue;
      }
      CHECK(std::abs(lhs) <= 1e-12 * std::max(1.0, std::abs(ev.eta(i))));
      // s_i parallel to B_i^T grad h_i
      CHECK((si - gi * (gi.dot(si) / gi.squaredNorm())).norm() <= 1e-12);
      // Feasible points on the constraint boundary are never shorter.
      for (int t = 0; t < 20; ++t) {
        VectorXd theta = random_vector(rng, gi.size(), 5.0);
        theta += gi * ((-ev.eta(i) - gi.dot(theta)) / gi.squaredNorm());
        CHECK(theta.norm() >= si.norm() - 1e-12);
      }
    }
  }
}

TEST_CASE("perturbed filter") {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 1000; ++k) {
    const RandomInstance r = random_instance(rng);
    const NetworkModel m = r.model();
    const SafetySpec spec = r.spec();
    const VectorXd s = static_filter(spec, m, r.x, r.w).correction;
    CHECK(perturbed_static_filter(spec, m, r.x, r.w, VectorXd::Zero(r.x.size())) == s);

    // ||s_e - s|| <= ell_se ||e||, with ell_se from the dense block-diagonal operator.
    const VectorXd e = random_vector(rng, r.x.size(), 0.5);
    MatrixXd op = MatrixXd::Zero(r.layout.input_dim(), r.layout.state_dim());
    for (std::size_t i = 0; i < r.layout.count(); ++i) {
      if (!r.normal[i]) continue;
      const VectorXd c = *r.normal[i];
      const VectorXd gi = r.B[i].transpose() * c;
      op.block(r.layout.input_offset(i), r.layout.state_offset(i), gi.size(), c.size()) =
          (gi / gi.squaredNorm()) * c.transpose();
    }
    const double ell = induced_norm(op, Norm::Two);
    CHECK((perturbed_static_filter(spec, m, r.x, r.w, e) - s).norm() <= ell * e.norm() + 1e-12);
  }
  const NetworkModel m = scalar_model();
  // eta = -1, grad h = 1, e = -0.25 -> 1.25 d with d = 1.
  CHECK(perturbed_static_filter(scalar_spec(0.0, 1.0), m, scalar(-1.0), scalar(0.0), scalar(-0.25))(0) ==
        doctest::Approx(1.25));
}

TEST_CASE("dynamic target examples and identity chain") {
  const BarrierFunction h = affine_barrier(scalar(1.0), 0.0, 1.0);
  CHECK(dynamic_filter_target(h, MatrixXd::Ones(1, 1), scalar(-0.1), scalar(0.0), scalar(0.0))(0) ==
        doctest::Approx(0.1));

  std::mt19937_64 rng(55);
  for (int k = 0; k < 500; ++k) {
    const RandomInstance r = random_instance(rng);
    const NetworkModel m = r.model();
    const SafetySpec spec = r.spec();
    const VectorXd s = static_filter(spec, m, r.x, r.w).correction;
    const VectorXd z = random_vector(rng, r.layout.input_dim());
    const VectorXd perfect = m.filtered_rhs(r.x, z, r.w);
    CHECK((dynamic_filter_targets(spec, m, r.x, z, perfect) - s).norm() <= 1e-10);

    const VectorXd e = random_vector(rng, r.x.size(), 0.3);
    CHECK((dynamic_filter_targets(spec, m, r.x, z, perfect + e) - perturbed_static_filter(spec, m, r.x, r.w, e))
              .norm() <= 1e-10);
  }
}

TEST_CASE("dynamic targets are local") {
  std::mt19937_64 rng(56);
  for (int k = 0; k < 300; ++k) {
    const RandomInstance r = random_instance(rng, 4);
    if (r.layout.count() < 2) continue;
    const NetworkModel m = r.model();
    const SafetySpec spec = r.spec();
    const VectorXd z = random_vector(rng, r.layout.input_dim());
    const VectorXd xd = random_vector(rng, r.x.size());
    const VectorXd base = dynamic_filter_targets(spec, m, r.x, z, xd);
    VectorXd x2 = r.x, z2 = z, xd2 = xd;
    const std::size_t i = 0;
    for (std::size_t j = 1; j < r.layout.count(); ++j) {
      x2.segment(r.layout.state_offset(j), r.layout.state_dim(j)) += random_vector(rng, r.layout.state_dim(j));
      xd2.segment(r.layout.state_offset(j), r.layout.state_dim(j)) += random_vector(rng, r.layout.state_dim(j));
      z2.segment(r.layout.input_offset(j), r.layout.input_dim(j)) += random_vector(rng, r.layout.input_dim(j));
    }
    const VectorXd moved = dynamic_filter_targets(spec, m, x2, z2, xd2);
    CHECK(r.layout.input_block(moved, i) == r.layout.input_block(base, i));
  }
}

TEST_CASE("well-posedness report") {
  std::vector<VectorXd> samples;
  for (int k = -100; k <= 100; ++k) samples.push_back(scalar(0.001 * k));
  const WellPosednessReport ok = check_wellposed(scalar_spec(0.0, 1.0), scalar_model(), samples, scalar(0.0));
  CHECK(ok.pass);
  CHECK(ok.near_boundary > 0);
  CHECK(ok.min_gradient_norm == doctest::Approx(1.0));

  const WellPosednessReport bad =
      check_wellposed(scalar_spec(0.0, 1.0), scalar_model(0.0, 0.0), samples, scalar(0.0));
  CHECK_FALSE(bad.pass);
  CHECK(bad.degenerate_points > 0);
}

TEST_CASE("class-K gain and barrier gradient") {
  const ClassKFunction a = ClassKFunction::linear(10.0);
  CHECK(a(0.0) == 0.0);
  for (double s = -2.0; s < 2.0; s += 0.01) CHECK(a(s + 0.01) > a(s));
  std::mt19937_64 rng(4);
  const VectorXd c = random_vector(rng, 3);
  const BarrierFunction h = affine_barrier(c, 0.2, 1.0);
  const VectorXd x = random_vector(rng, 3);
  for (Index j = 0; j < 3; ++j) {
    const VectorXd step = 1e-6 * VectorXd::Unit(3, j);
    const double fd = (h.value(x + step) - h.value(x - step)) / 2e-6;
    CHECK(fd == doctest::Approx(h.gradient(x)(j)).epsilon(1e-5));
  }
}

}
