#pragma once

#include <stdexcept>
#include <string>

namespace softbio {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration, CLI usage, or generation spec. Maps to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Malformed input data or a computation that cannot proceed. Maps to exit code 1.
class DataError : public Error {
 public:
  using Error::Error;
};

// Every trait of a comparison is undefined; callers decide the fallback.
class NoEvidenceError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace softbio
