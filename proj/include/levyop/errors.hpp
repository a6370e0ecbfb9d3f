#pragma once

#include <stdexcept>
#include <string>

namespace levyop {

// All library failures derive from Error so callers (the CLI in particular)
// can attach pipeline-stage context without caring about the concrete kind.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation (e.g. y = 0 for k).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent parameters (grid mismatch, s <= 0, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of the operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Numerical procedure failed to reach its tolerance.
class ComputationError : public Error {
 public:
  using Error::Error;
};

/// Iteration that should contract did not (Neumann series, etc.).
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Configuration file problem; the message names the line or field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Monte Carlo request cannot reach the requested standard error.
class AdvisoryError : public Error {
 public:
  AdvisoryError(const std::string& what, long required_paths)
      : Error(what), required_paths_(required_paths) {}
  long required_paths() const noexcept { return required_paths_; }

 private:
  long required_paths_;
};

[[noreturn]] void throw_parameter(const std::string& what);

}  // namespace levyop
