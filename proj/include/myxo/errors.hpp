#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace myxo {

/// Base of every error raised by the library. `error_class()` is a stable,
/// machine-readable name used by the CLI when reporting failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* error_class() const noexcept { return "Error"; }
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
  const char* error_class() const noexcept override { return "InvalidArgument"; }
};

class GridMismatch : public Error {
 public:
  using Error::Error;
  const char* error_class() const noexcept override { return "GridMismatch"; }
};

class MassMismatch : public Error {
 public:
  using Error::Error;
  const char* error_class() const noexcept override { return "MassMismatch"; }
};

class NotTwoGroup : public Error {
 public:
  using Error::Error;
  const char* error_class() const noexcept override { return "NotTwoGroup"; }
};

class CflViolation : public Error {
 public:
  using Error::Error;
  const char* error_class() const noexcept override { return "CflViolation"; }
};

class VacuumError : public Error {
 public:
  using Error::Error;
  const char* error_class() const noexcept override { return "VacuumError"; }
};

class FitError : public Error {
 public:
  using Error::Error;
  const char* error_class() const noexcept override { return "FitError"; }
};

/// Raised when an explicit step produces a negative density under the
/// abort policy. `step` is the index of the offending step (1-based count of
/// steps taken from the initial state).
class NegativityDetected : public Error {
 public:
  NegativityDetected(const std::string& what, std::size_t step, double min_value)
      : Error(what), step_(step), min_value_(min_value) {}
  const char* error_class() const noexcept override { return "NegativityDetected"; }
  std::size_t step() const noexcept { return step_; }
  double min_value() const noexcept { return min_value_; }

 private:
  std::size_t step_;
  double min_value_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
  const char* error_class() const noexcept override { return "ConfigError"; }
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* error_class() const noexcept override { return "IoError"; }
};

}  // namespace myxo
