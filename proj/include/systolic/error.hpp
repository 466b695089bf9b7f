#pragma once

#include <stdexcept>
#include <string>

namespace systolic {

/// Bad user input: invalid family parameters, malformed samples, a wind
/// outside the admissible range. Maps to CLI exit status 1.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure did not meet its contract (event not found,
/// quadrature not converged, cross-check violated). Maps to CLI exit status 2.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace systolic
