#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace swankit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax or lexical problem in a DSL string. `offset()` is the byte offset
/// into the input at which the problem was detected.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Evaluation left the domain of an elementary function (division by zero,
/// log of a non-positive number, sqrt of a negative number, overflow).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A named parameter was not bound at evaluation time.
class UnboundParameter : public Error {
 public:
  using Error::Error;
};

/// Operands refer to different independent variables.
class VariableMismatch : public Error {
 public:
  using Error::Error;
};

/// Model parameters violate a precondition (e.g. omega_tilde == 0).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A coefficient function vanishes or changes sign inside the working domain.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Inputs that are individually valid but do not belong together
/// (e.g. a gauge function that does not remove the first-order term).
class InconsistentInputs : public Error {
 public:
  using Error::Error;
};

/// Requested f-class is not implemented (class V, Weierstrass p).
class UnsupportedClass : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration file or command-line input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace swankit
