#pragma once

#include <stdexcept>
#include <string>

namespace swarmcov {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Point evaluated outside the closure of a field's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid parameters: bad extents, violated preconditions, rejected config keys.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input files.
class LoadError : public Error {
 public:
  using Error::Error;
};

// Grid functions defined on different grids.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// Explicit time step exceeds the stability bound.
class StepError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Fits or scale factors with no usable data.
class DegenerateError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace swarmcov
