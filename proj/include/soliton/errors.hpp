#pragma once

#include <stdexcept>
#include <string>

namespace soliton {

/// Failure categories reported by the solver suite.
enum class ErrorKind {
  configuration,
  singular_system,
  non_convergence,
  collapse_to_zero,
  projection_failure,
  divergence,
  search_failure,
  window_underflow,
  invalid_argument,
  io
};

inline char const* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::configuration: return "configuration error";
    case ErrorKind::singular_system: return "singular system";
    case ErrorKind::non_convergence: return "non-convergence";
    case ErrorKind::collapse_to_zero: return "collapse to zero";
    case ErrorKind::projection_failure: return "projection failure";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::search_failure: return "search failure";
    case ErrorKind::window_underflow: return "window underflow";
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::io: return "i/o error";
  }
  return "error";
}

/// Every error names the operation that raised it: "op: kind: detail".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string operation, std::string const& detail)
      : std::runtime_error(operation + ": " + to_string(kind) + ": " + detail),
        kind_(kind),
        operation_(std::move(operation)) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string const& operation() const noexcept { return operation_; }

 private:
  ErrorKind kind_;
  std::string operation_;
};

}  // namespace soliton
