#pragma once

#include <stdexcept>
#include <string>

namespace drf {

// Exception hierarchy. The CLI maps each leaf type to its own exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or malformed dataset files.
class DataError : public Error {
 public:
  using Error::Error;
};

// Numerical failures that callers are expected to handle or report.
class LinalgError : public Error {
 public:
  using Error::Error;
};

// Input dimension does not match the trained model.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class UnknownVariantError : public Error {
 public:
  using Error::Error;
};

// Malformed or incompatible model documents.
class ModelError : public Error {
 public:
  using Error::Error;
};

class StatsError : public Error {
 public:
  using Error::Error;
};

}  // namespace drf
