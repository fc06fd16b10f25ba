#pragma once

#include <Eigen/Dense>

#include <string>
#include <string_view>

namespace netcbf {

/// Vector norms with closed-form induced norms and log-norms.
enum class Norm { Two, Inf };

std::string_view to_string(Norm norm);
Norm parse_norm(std::string_view text);

double vector_norm(const Eigen::VectorXd& v, Norm norm);

/// Induced matrix norm; rectangular matrices allowed.
double induced_norm(const Eigen::MatrixXd& m, Norm norm);

/// mu(M) = lim_{h->0+} (||I + hM|| - 1)/h.
/// Two: largest eigenvalue of the symmetric part. Inf: max_i (M_ii + sum_{j!=i} |M_ij|).
/// Throws NumericalError when the eigensolver fails or M is not square.
double log_norm(const Eigen::MatrixXd& m, Norm norm);

}  // namespace netcbf
