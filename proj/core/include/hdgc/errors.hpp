#pragma once

#include <stdexcept>
#include <string>

namespace hdgc {

/// Invalid knobs, options, or request shapes. CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unusable input data: parse failures, degenerate columns, broken
/// partitions. CLI maps this to exit code 3.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape mismatch between arrays that must agree.
class DimensionError : public DataError {
 public:
  using DataError::DataError;
};

/// Numerical failure at run time: solver divergence, near-singular designs,
/// degenerate variances. CLI maps this to exit code 4.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hdgc
