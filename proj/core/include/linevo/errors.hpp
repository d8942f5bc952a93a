#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace linevo {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset()` is the byte offset of the offending token.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Invalid input that is not a parse failure (bad document, wrong tuple length, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Numeric evaluation outside the domain of an expression (log of a
/// nonpositive value, division by zero, even root of a negative number).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A request that falls outside the supported expression or equation fragment.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// An internal invariant was violated. Always indicates a bug.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace linevo
