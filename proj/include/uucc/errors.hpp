#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uucc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A scalar argument lies outside the function's domain (e.g. a non-finite margin).
class InputDomainError : public Error {
 public:
  using Error::Error;
};

class UnsupportedOperationError : public Error {
 public:
  using Error::Error;
};

/// Invalid hyperparameters, sizes or options.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// theta and theta_prime too close together for the rewriting coefficients to exist.
class DegeneratePriorsError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A caller broke an API contract (e.g. used a forward cache after a parameter update).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Not enough examples of one class to build the requested unlabeled sets.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf appeared in an objective, gradient or parameter while training.
class TrainingFault : public Error {
 public:
  TrainingFault(const std::string& what, std::size_t epoch, std::size_t batch)
      : Error(what + " (epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch) + ")"),
        epoch_(epoch),
        batch_(batch) {}

  std::size_t epoch() const noexcept { return epoch_; }
  std::size_t batch() const noexcept { return batch_; }

 private:
  std::size_t epoch_;
  std::size_t batch_;
};

/// Malformed binary input. `offset()` is the byte position where parsing failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Command-line or config-file problem; `key()` names the offending setting.
class UsageError : public Error {
 public:
  UsageError(const std::string& key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(key) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace uucc
