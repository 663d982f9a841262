#pragma once

#include <stdexcept>
#include <string>

namespace cusp {

/// Input outside the documented domain of an operation (bad parameters,
/// mismatched grids, invalid index data).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed on valid input: singular systems, Newton
/// stagnation, positivity loss below the damping floor.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cusp
