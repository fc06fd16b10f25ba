#include "netcbf/norms.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "netcbf/errors.hpp"

namespace netcbf {

std::string_view to_string(Norm norm) { return norm == Norm::Two ? "two" : "inf"; }

Norm parse_norm(std::string_view text) {
  if (text == "two" || text == "2") return Norm::Two;
  if (text == "inf") return Norm::Inf;
  throw std::invalid_argument("unknown norm '" + std::string(text) + "' (expected two|inf)");
}

double vector_norm(const Eigen::VectorXd& v, Norm norm) {
  if (v.size() == 0) return 0.0;
  return norm == Norm::Two ? v.norm() : v.cwiseAbs().maxCoeff();
}

double induced_norm(const Eigen::MatrixXd& m, Norm norm) {
  if (m.size() == 0) return 0.0;
  if (norm == Norm::Inf) return m.cwiseAbs().rowwise().sum().maxCoeff();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

double log_norm(const Eigen::MatrixXd& m, Norm norm) {
  if (m.rows() != m.cols() || m.size() == 0) {
    throw NumericalError("log_norm: matrix must be square and non-empty");
  }
  if (norm == Norm::Inf) {
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      double row = m(i, i);
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (j != i) row += std::abs(m(i, j));
      }
      best = std::max(best, row);
    }
    return best;
  }
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericalError("log_norm: eigensolver did not converge");
  return eig.eigenvalues().maxCoeff();
}

}  // namespace netcbf
