#pragma once

#include <stdexcept>
#include <string>

namespace nnrw {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated caller contract, typically a dimension mismatch.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Non-finite value where a finite one is required.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid network, experiment or command configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Dataset file could not be read, parsed or validated.
class DatasetError : public Error {
 public:
  using Error::Error;
};

class ModelFormatError : public Error {
 public:
  enum class Reason { BadMagic, BadVersion, Truncated, Malformed, Io };

  ModelFormatError(Reason reason, const std::string& what)
      : Error(what), reason_(reason) {}

  Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

/// Factorization or decomposition failure.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace nnrw
