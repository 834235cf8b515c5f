#pragma once

#include <cstdint>
#include <stdexcept>

namespace autospmv {

/// Index type used by every stored row/column index array.
using index_t = std::int32_t;

/// Thrown when a conversion or densification would exceed its size guard.
class GuardExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by kernels when operand lengths disagree with matrix shape.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or schema-incompatible data files (datasets, observations).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace autospmv
