#pragma once

#include <stdexcept>
#include <string>

namespace goalrom {

/// Violated precondition on an input (empty set, mismatched dimensions, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A nonlinear or linear solve did not reach its tolerance.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, double final_norm, int iterations)
      : std::runtime_error(what), final_norm_(final_norm), iterations_(iterations) {}

  double final_norm() const noexcept { return final_norm_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double final_norm_;
  int iterations_;
};

/// Reduced normal-equations or dual system is numerically singular.
class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(const std::string& what, double condition_estimate)
      : std::runtime_error(what), condition_estimate_(condition_estimate) {}

  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

/// NNLS stopped before reaching the requested relative residual.
class ConvergenceFailure : public std::runtime_error {
 public:
  ConvergenceFailure(const std::string& what, double best_ratio)
      : std::runtime_error(what), best_ratio_(best_ratio) {}

  double best_ratio() const noexcept { return best_ratio_; }

 private:
  double best_ratio_;
};

/// POD input whose deviations from the mean are all zero.
class EmptyBasisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sampling loop hit its cycle cap before meeting the tolerance.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, int cycles)
      : std::runtime_error(what), cycles_(cycles) {}

  int cycles() const noexcept { return cycles_; }

 private:
  int cycles_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace goalrom
