#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace netcbf {

/// Dimension or layout mismatch between arguments.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// B_i^T grad h_i vanishes where the filter needs a direction.
class WellPosednessViolation : public std::runtime_error {
 public:
  WellPosednessViolation(std::size_t subsystem, double gradient_norm, const std::string& what)
      : std::runtime_error(what), subsystem_(subsystem), gradient_norm_(gradient_norm) {}

  std::size_t subsystem() const noexcept { return subsystem_; }
  double gradient_norm() const noexcept { return gradient_norm_; }

 private:
  std::size_t subsystem_;
  double gradient_norm_;
};

/// A half-space subproblem of the QP has no feasible point.
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// NaN/Inf appeared in the integrated state.
class NumericalBlowup : public std::runtime_error {
 public:
  NumericalBlowup(std::size_t step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// The state left the analysis box by more than the allowed excursion.
class DomainExit : public std::runtime_error {
 public:
  DomainExit(std::size_t step, const std::string& what) : std::runtime_error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Linear-algebra failure (eigensolver did not converge, non-finite Jacobian).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A bound was requested outside the hypotheses it is proven under.
class HypothesisNotMet : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace netcbf
