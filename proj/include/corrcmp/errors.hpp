#pragma once

#include <stdexcept>

namespace corrcmp {

/// Base class of every exception thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument violates a documented precondition or domain restriction.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A sample is unusable: a constant column, or perfectly collinear columns.
class DegenerateDataError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Fewer observations than the minimum group size.
class TooFewObservationsError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Malformed input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Internal numerical inconsistency, e.g. an impossible common-correlation
/// value or a zero-variance bootstrap.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace corrcmp
