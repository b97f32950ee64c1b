#pragma once

#include <stdexcept>
#include <string>

namespace postadc {

// Bad configuration or arguments supplied by the caller.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numeric kernel left its supported range (factorization failure,
// mass underflow beyond log-space range, quadrature non-convergence).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The selection rule produced no usable target (single window, I = J,
// empty region membership, eta below the zero tolerance).
struct DegenerateSelection : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An internal consistency check failed: the observed data do not
// reproduce their own selection event, or a replay disagrees.
struct VerificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace postadc
