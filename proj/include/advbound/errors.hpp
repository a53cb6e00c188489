#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace advbound {

// Base for all library errors. The CLI maps each subclass to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input data or configuration (exit code 2).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Interior-point failure: no decrease, iteration cap, KKT certificate unmet (exit code 3).
class SolverError : public Error {
 public:
  using Error::Error;
};

// Enumeration exceeded a configured size limit (exit code 4).
class ResourceError : public Error {
 public:
  using Error::Error;
};

enum class DatasetErrorKind {
  kMalformedRow,
  kDimensionMismatch,
  kEmptyClass,
  kNonPositiveWeight,
  kIo,
};

class DatasetError : public ValidationError {
 public:
  DatasetError(DatasetErrorKind kind, std::size_t row, const std::string& what)
      : ValidationError(what), kind_(kind), row_(row) {}

  DatasetErrorKind kind() const { return kind_; }
  // 1-based line number in the source file; 0 when not tied to a row.
  std::size_t row() const { return row_; }

 private:
  DatasetErrorKind kind_;
  std::size_t row_;
};

// Query point lies outside the epsilon-reach of every class.
class UnreachableQueryError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace advbound
