#pragma once

#include <stdexcept>
#include <string>

namespace pfnl {

/// Base class of all errors raised by the library. Messages are prefixed with
/// the module that raised them, e.g. "kernels: alpha out of range".
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: bad configuration values, unsupported dimensions,
/// unresolved kernels. The CLI maps these to exit status 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Raised when the kernel radius is not resolved by the grid (eps < 4h).
class ResolutionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Iterative solver failed (CG or Newton).
class SolverError : public Error {
 public:
  using Error::Error;
};

/// A quantity requested on degenerate input, e.g. the BBM ratio of a constant.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace pfnl
