#pragma once

#include <stdexcept>
#include <string>

namespace infometer {

enum class ErrorKind {
  InvalidInput,      // NaN/Inf, ragged rows, malformed files
  InvalidConfig,     // hyperparameters outside their domain
  DegenerateInput,   // constant columns, zero neighbor distances
  InsufficientData,  // too few rows for the requested window
  DisjointSupport,   // KL with q(x) = 0 where p(x) > 0
  SystemTooLarge,    // TPM above the node cap
  MissingField,      // incomplete report manifest
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class MissingFieldError : public Error {
 public:
  explicit MissingFieldError(std::string field)
      : Error(ErrorKind::MissingField, field), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace infometer
