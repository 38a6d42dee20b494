#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cfrit {

/// Base class for every error raised by the toolkit. `code()` is a short
/// machine-parsable tag (e.g. "dimension", "overflow", "bad_frame").
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message);
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& m) : Error("dimension", m) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& m) : Error("invalid_argument", m) {}
};

class RangeError : public Error {
 public:
  explicit RangeError(const std::string& m) : Error("range", m) {}
};

class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& m, double condition)
      : Error("singular_matrix", m), condition_(condition) {}
  /// Condition-number estimate at the time of failure (may be +inf).
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& m) : Error("capacity", m) {}
};

/// Encoded value does not fit the plaintext space.
class OverflowError : public Error {
 public:
  explicit OverflowError(const std::string& m) : Error("overflow", m) {}
};

/// Value outside the message space of a scheme (e.g. not in the ElGamal subgroup).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& m) : Error("domain", m) {}
};

class GenerationTimeout : public Error {
 public:
  explicit GenerationTimeout(const std::string& m) : Error("generation_timeout", m) {}
};

/// CKKS operands at different levels or scales.
class AlignmentError : public Error {
 public:
  explicit AlignmentError(const std::string& m) : Error("alignment", m) {}
};

/// CKKS modulus chain exhausted.
class DepthError : public Error {
 public:
  DepthError(const std::string& m, int required, int available)
      : Error("depth", m), required_(required), available_(available) {}
  int required() const noexcept { return required_; }
  int available() const noexcept { return available_; }

 private:
  int required_;
  int available_;
};

class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& m) : Error("protocol", m) {}
  ProtocolError(std::string code, const std::string& m) : Error(std::move(code), m) {}
};

class TimeoutError : public Error {
 public:
  explicit TimeoutError(const std::string& m) : Error("timeout", m) {}
};

class NetworkError : public Error {
 public:
  explicit NetworkError(const std::string& m) : Error("network", m) {}
};

/// Error reply received from a remote tuning server; `code()` is the server's code.
class RemoteError : public Error {
 public:
  RemoteError(std::string code, const std::string& detail) : Error(std::move(code), detail) {}
};

}  // namespace cfrit
