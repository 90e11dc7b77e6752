#pragma once

#include <stdexcept>
#include <string>

namespace hardinv {

// Shape disagreement between matrices, layers, or schemas.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A precondition or invariant of an operation was violated by the caller.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// NaN or Inf reached a place where only finite values are allowed.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-range input data (CSV cells, artifact files).
class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Column layout of a dataset or scaler does not match the feature schema.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A metric is undefined for the given data, e.g. r2 of a constant truth.
class UndefinedMetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Bad configuration key or value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hardinv
