#pragma once

#include <stdexcept>
#include <string>

namespace holonomy {

/// Bad input: wrong dimensions, malformed records, violated preconditions.
/// The CLI maps these to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that was set up correctly but could not produce a result.
/// The CLI maps these to exit code 1.
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DegreeOverflow : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DegreeCapExceeded : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

class NotPositiveDefinite : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class SingularMatrix : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

/// An exact-arithmetic operation (root, square root) whose result is not rational.
class InexactOperation : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

class NotStable : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

class IndefiniteMetric : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

class CompatibilityViolation : public ComputationError {
 public:
  CompatibilityViolation(std::string constraint, double residual)
      : ComputationError("compatibility constraint '" + constraint +
                         "' violated, residual " + std::to_string(residual)),
        constraint_(std::move(constraint)),
        residual_(residual) {}

  const std::string& constraint() const { return constraint_; }
  double residual() const { return residual_; }

 private:
  std::string constraint_;
  double residual_;
};

class MissingDerivativeData : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UnknownGenerator : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class MissingTableEntry : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class RateOutOfRange : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ContextMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ParseError : public ValidationError {
 public:
  ParseError(int line, const std::string& what)
      : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace holonomy
