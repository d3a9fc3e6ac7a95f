#pragma once

#include <stdexcept>
#include <string>

namespace sfcdd {

// Error taxonomy used across the library. All conditions that a caller can
// provoke through bad arguments or configs throw one of these; solver-level
// outcomes (divergence, failed recovery) are statuses, not exceptions.

struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedSize : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidConfig : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidMatrix : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ResourceLimit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalBreakdown : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnrecoverableData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EstimationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sfcdd
