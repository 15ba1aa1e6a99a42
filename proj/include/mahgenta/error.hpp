#pragma once

#include <stdexcept>
#include <string>

namespace mahgenta {

enum class ErrorKind {
  invalid_argument,
  domain,
  capacity,
  convergence,
  step_size,
  parse,
  io,
};

/// Base of every exception thrown by the library. The kind maps one-to-one
/// onto the C API status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct DomainError : Error {
  explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

/// Raised when an operation would need to enumerate more cells than allowed.
struct CapacityError : Error {
  explicit CapacityError(const std::string& what) : Error(ErrorKind::capacity, what) {}
};

/// Iterative solver ran out of budget; carries the last residual.
struct ConvergenceError : Error {
  ConvergenceError(const std::string& what, double residual)
      : Error(ErrorKind::convergence, what), residual(residual) {}
  double residual;
};

struct StepSizeError : Error {
  explicit StepSizeError(const std::string& what) : Error(ErrorKind::step_size, what) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& what) : Error(ErrorKind::parse, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

struct ArgumentError : Error {
  explicit ArgumentError(const std::string& what) : Error(ErrorKind::invalid_argument, what) {}
};

}  // namespace mahgenta
