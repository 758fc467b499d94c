#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tcim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unreadable input. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Invalid slice, capacity or cost configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input too large for a bounded algorithm.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Broken simulator invariant; never expected in a correct run.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace tcim
