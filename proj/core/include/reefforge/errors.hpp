#pragma once

#include <stdexcept>
#include <string>

namespace reefforge {

// Exit-code taxonomy shared by the library and the CLI:
//   1 validation / contract / parse errors
//   2 file I/O
//   3 backend / transport / protocol
class Error : public std::runtime_error {
 public:
  Error(std::string message, int exit_code)
      : std::runtime_error(std::move(message)), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::string message) : Error(std::move(message), 1) {}
};

// Parameter outside an operation's valid domain (e.g. curve parameter t).
class DomainError : public ValidationError {
 public:
  explicit DomainError(std::string message) : ValidationError(std::move(message)) {}
};

class GeometryError : public ValidationError {
 public:
  explicit GeometryError(std::string message) : ValidationError(std::move(message)) {}
};

// A stated resource or packing limit was exceeded; the message names the
// failing constraint.
class CapacityError : public ValidationError {
 public:
  explicit CapacityError(std::string message) : ValidationError(std::move(message)) {}
};

class ParseError : public ValidationError {
 public:
  explicit ParseError(std::string message) : ValidationError(std::move(message)) {}
};

// Metric has no defined value for the input (e.g. AP with zero ground truths).
class UndefinedMetricError : public ValidationError {
 public:
  explicit UndefinedMetricError(std::string message) : ValidationError(std::move(message)) {}
};

class IoError : public Error {
 public:
  explicit IoError(std::string message) : Error(std::move(message), 2) {}
};

class TransportError : public Error {
 public:
  explicit TransportError(std::string message) : Error(std::move(message), 3) {}
};

class BackendError : public Error {
 public:
  explicit BackendError(std::string message) : Error(std::move(message), 3) {}
};

// Backend answered, but the reply violates the wire contract.
class ProtocolError : public Error {
 public:
  explicit ProtocolError(std::string message) : Error(std::move(message), 3) {}
};

}  // namespace reefforge
