#pragma once

#include <stdexcept>
#include <string>

namespace compete {

/// Failure categories. The numeric values double as CLI exit codes.
enum class ErrorKind : int {
  config = 2,
  precondition = 3,
  convergence = 4,
  numerical = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Malformed input: bad config keys, inconsistent periods, invalid grids.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::config, what) {}
};

/// A mathematical hypothesis required by the computation does not hold.
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what)
      : Error(ErrorKind::precondition, what) {}
};

/// An iteration exhausted its budget.
class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& what)
      : Error(ErrorKind::convergence, what) {}
};

/// Blow-up, stability-bound violation, or a front reaching the boundary.
class NumericalGuard : public Error {
 public:
  explicit NumericalGuard(const std::string& what)
      : Error(ErrorKind::numerical, what) {}
};

}  // namespace compete
