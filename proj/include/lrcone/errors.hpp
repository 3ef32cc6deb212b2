#pragma once

#include <stdexcept>
#include <string>

namespace lrcone {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad spec, bad grid, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A truncated representation would exceed the configured dimension budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// A numerical certificate failed (step-halving disagreement, eigensolver
/// failure, Krylov breakdown without convergence).
class CertificationFailure : public Error {
 public:
  using Error::Error;
};

/// An experiment configuration could not be parsed or validated.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace lrcone
