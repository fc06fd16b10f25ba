#pragma once

// Hand-rolled generators shared by the unit and acceptance tests.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <optional>
#include <random>
#include <vector>

#include "netcbf/core_model.hpp"
#include "netcbf/safety_filter.hpp"

namespace netcbf::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Index pick(std::mt19937_64& rng, Index lo, Index hi) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

inline VectorXd random_vector(std::mt19937_64& rng, Index n, double scale = 1.0) {
  VectorXd v(n);
  for (Index k = 0; k < n; ++k) v(k) = uniform(rng, -scale, scale);
  return v;
}

inline MatrixXd random_matrix(std::mt19937_64& rng, Index r, Index c, double scale = 1.0) {
  MatrixXd m(r, c);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < c; ++j) m(i, j) = uniform(rng, -scale, scale);
  }
  return m;
}

// Linear-plus-sine network with affine barriers; every constrained block has
// ||B_i^T c_i|| >= 0.1 so the instance is well posed.
struct RandomInstance {
  SubsystemLayout layout;
  MatrixXd A;
  std::vector<MatrixXd> B;
  std::vector<MatrixXd> K;
  std::vector<std::optional<VectorXd>> normal;
  std::vector<double> offset;
  std::vector<double> gain;
  VectorXd x;
  VectorXd w;

  NetworkModel model() const {
    const MatrixXd a = A;
    auto coupling = [a](const VectorXd& s) -> VectorXd { return a * s + 0.3 * s.array().sin().matrix(); };
    std::vector<LocalController> nominal;
    for (const auto& k : K) nominal.emplace_back([k](const VectorXd& xi) -> VectorXd { return k * xi; });
    const Index n = layout.state_dim();
    return NetworkModel(layout, coupling, B, nominal, Box{VectorXd::Constant(n, -2.0), VectorXd::Constant(n, 2.0)});
  }

  SafetySpec spec() const {
    std::vector<std::optional<BarrierFunction>> barriers;
    for (std::size_t i = 0; i < normal.size(); ++i) {
      if (normal[i]) {
        barriers.emplace_back(affine_barrier(*normal[i], offset[i], gain[i]));
      } else {
        barriers.emplace_back(std::nullopt);
      }
    }
    return SafetySpec(std::move(barriers));
  }

  // F(x) by dense assembly, independent of NetworkModel.
  VectorXd dense_closed_loop(const VectorXd& s) const {
    MatrixXd bk = MatrixXd::Zero(layout.state_dim(), layout.state_dim());
    for (std::size_t i = 0; i < B.size(); ++i) {
      bk.block(layout.state_offset(i), layout.state_offset(i), layout.state_dim(i), layout.state_dim(i)) = B[i] * K[i];
    }
    return A * s + 0.3 * s.array().sin().matrix() + bk * s;
  }
};

inline RandomInstance random_instance(std::mt19937_64& rng, std::size_t max_subsystems = 4, Index max_n = 3,
                                      Index max_m = 2, bool allow_unconstrained = true) {
  RandomInstance r;
  const std::size_t count = static_cast<std::size_t>(pick(rng, 1, static_cast<Index>(max_subsystems)));
  std::vector<Index> nd, md;
  for (std::size_t i = 0; i < count; ++i) {
    nd.push_back(pick(rng, 1, max_n));
    md.push_back(pick(rng, 1, max_m));
  }
  r.layout = SubsystemLayout(nd, md);
  const Index n = r.layout.state_dim();
  r.A = random_matrix(rng, n, n);
  for (std::size_t i = 0; i < count; ++i) {
    r.K.push_back(random_matrix(rng, md[i], nd[i], 0.5));
    const bool constrained = !allow_unconstrained || uniform(rng, 0.0, 1.0) < 0.85;
    MatrixXd b;
    VectorXd c;
    do {
      b = random_matrix(rng, nd[i], md[i]);
      c = random_vector(rng, nd[i]);
    } while ((b.transpose() * c).norm() < 0.1);
    r.B.push_back(b);
    r.normal.push_back(constrained ? std::optional<VectorXd>(c) : std::nullopt);
    r.offset.push_back(uniform(rng, -0.5, 0.5));
    r.gain.push_back(uniform(rng, 0.5, 5.0));
  }
  r.x = random_vector(rng, n);
  r.w = random_vector(rng, n, 0.5);
  return r;
}

}  // namespace netcbf::testing
