#pragma once

#include <stdexcept>
#include <string>

namespace curvop {

// Base class for all errors raised by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Dimension / index-domain mismatches, malformed specs, invalid windows.
struct DomainError : Error {
  explicit DomainError(const std::string& what) : Error(what) {}
};

// Operator fails the contraction bound (norm > 1 + tolerance).
struct ContractionError : Error {
  explicit ContractionError(const std::string& what) : Error(what) {}
};

// An operation was invoked outside its stated precondition
// (e.g. the dilation curvature estimator on a non partial isometry).
struct PreconditionError : Error {
  explicit PreconditionError(const std::string& what) : Error(what) {}
};

// Iterative numerics failed to converge.  Does not occur at the problem
// sizes this library targets; raised instead of returning garbage.
struct NumericError : Error {
  explicit NumericError(const std::string& what) : Error(what) {}
};

}  // namespace curvop
