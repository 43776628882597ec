#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bcsgap {

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Base for failures of a numerical procedure; carries the last residual or bound.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// (1 + B) is singular: the potential supports a zero-energy or bound state.
class BoundStateError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Zero-energy resonance detected by the ODE oracle (u'(R) ~ 0).
class ResonanceError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Gap iteration collapsed to the trivial solution Delta = 0.
class TrivialSolutionError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// A candidate pairing function violates |2 alpha| <= 1.
class InconsistentSolutionError : public NumericError {
 public:
  using NumericError::NumericError;
};

class NonConvergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Root bracketing failed; samples holds the (T, lambda_min) pairs that were tried.
class BracketError : public NumericError {
 public:
  BracketError(const std::string& what, std::vector<std::pair<double, double>> samples)
      : NumericError(what), samples_(std::move(samples)) {}
  const std::vector<std::pair<double, double>>& samples() const noexcept { return samples_; }

 private:
  std::vector<std::pair<double, double>> samples_;
};

/// A budgeted computation stopped early; residual() is the best available bound.
class PartialResultError : public NumericError {
 public:
  PartialResultError(const std::string& what, double estimate, double bound)
      : NumericError(what, bound), estimate_(estimate) {}
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

}  // namespace bcsgap
