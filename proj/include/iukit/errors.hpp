#pragma once

#include <stdexcept>
#include <string>

namespace iukit {

// Base class for numerical failures that callers are expected to handle
// separately from programming errors. The CLI maps these to exit code 2.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A monotone bracket search ran past its cap without finding a crossing.
class UnboundedSearchError : public NumericError {
 public:
  using NumericError::NumericError;
};

// An argument lies outside the mathematical domain of the operation.
class DomainError : public NumericError {
 public:
  using NumericError::NumericError;
};

// The requested value sits outside a tabulated curve's range.
class OutOfRangeError : public NumericError {
 public:
  using NumericError::NumericError;
};

// An iterative solver failed to reach its tolerance.
class NonConvergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

// A spectral expansion was asked for more accuracy than the available modes
// can deliver.
class InsufficientModesError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Psi or a quantity built on it does not exist because the defining integral
// diverges for the supplied rate function.
class DivergentRateError : public NumericError {
 public:
  using NumericError::NumericError;
};

// A least-squares fit was handed data it cannot determine a model from.
class RankDeficientError : public NumericError {
 public:
  using NumericError::NumericError;
};

// A radial quantity was requested at the pole where it is singular.
class PoleError : public NumericError {
 public:
  using NumericError::NumericError;
};

// An exterior eigenvalue did not stabilize under tail truncation, so the
// chosen r_max is too small to trust.
class RMaxTooSmallError : public NumericError {
 public:
  using NumericError::NumericError;
};

// A fit window contains too few grid nodes to be meaningful.
class WindowTooSmallError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace iukit
