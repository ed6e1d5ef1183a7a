#pragma once

#include <stdexcept>
#include <string>

namespace asdim {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violated: invalid index, empty set, bad parameter.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A configured size or memory cap would be exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// The space is too small for the requested asymptotic estimate.
class ScaleError : public Error {
 public:
  using Error::Error;
};

/// Iterative numerics (quadrature, Lanczos) failed to reach tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration; `line` is 0 when not tied to a file line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace asdim
