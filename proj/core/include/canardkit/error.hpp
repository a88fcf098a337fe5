#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace canardkit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed polynomial expression or system file.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(message + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
        message_(message),
        line_(line),
        column_(column) {}

  /// The message without the position suffix.
  const std::string& message() const noexcept { return message_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

/// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Misuse of the polynomial algebra (mismatched variables, division failures, ...).
class AlgebraError : public Error {
 public:
  using Error::Error;
};

/// The input violates a standing assumption of the analysis, so the method
/// does not apply (even multiplicities, X1(p_s) = 0, invalid blow-up weights).
class AssumptionViolation : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not proceed (singular Jacobian, non-finite state).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace canardkit
