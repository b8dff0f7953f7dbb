#pragma once

#include <stdexcept>
#include <string>

namespace lsi {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: bad parameters, unknown keys, out-of-range values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A mathematical check failed (a margin was violated).
class CheckFailure : public Error {
 public:
  using Error::Error;
};

/// Eigensolve failure, indefinite operator, or residual above tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace lsi
