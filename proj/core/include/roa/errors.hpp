#pragma once

#include <stdexcept>
#include <string>

namespace roa {

/// Invalid argument: bad dimensions, tolerances, parameter counts.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation outside the domain of a segment or trajectory.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// A family that cannot provide what was asked of it (e.g. derivatives of a jump).
class UnsupportedFamilyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Integrator failure at a specific time (step-size underflow).
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double t) : std::runtime_error(what), time_(t) {}
  [[nodiscard]] double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Newton failure in a nonlinear solve. `fold_suspect` is set when the
/// Jacobian became numerically singular.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_residual, bool fold_suspect = false)
      : std::runtime_error(what), residual_(last_residual), fold_suspect_(fold_suspect) {}
  [[nodiscard]] double last_residual() const noexcept { return residual_; }
  [[nodiscard]] bool fold_suspect() const noexcept { return fold_suspect_; }

 private:
  double residual_;
  bool fold_suspect_;
};

}  // namespace roa
