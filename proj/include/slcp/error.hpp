#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slcp {

/// Raised when arguments violate a documented precondition
/// (dimension mismatch, out-of-range parameter, non-finite data).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A problem file that is not well-formed. Carries the 1-based location
/// reported by the JSON reader when one is available (0 otherwise).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : std::runtime_error(what), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A well-formed problem file whose contents break an invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Linear algebra failure (e.g. a factorization met non-finite entries).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace slcp
