#pragma once

#include <stdexcept>
#include <string>

namespace alphaz {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Matrix/vector shapes or tensor factor lists do not line up.
struct DimensionMismatch : Error {
  using Error::Error;
};

// Scalar arguments outside their admissible range (alpha = 1, z <= 0, ...).
struct InvalidParams : Error {
  using Error::Error;
};

// An operand required to be positive definite is not (below the relative floor).
struct NotPositiveDefinite : Error {
  using Error::Error;
};

// An operand required to be invertible has a negligible smallest singular value.
struct Singular : Error {
  using Error::Error;
};

// An iterative procedure exhausted its iteration cap.
struct NonConvergence : Error {
  using Error::Error;
};

// Coefficient matrix of a two-equation exponent system is degenerate.
struct DegenerateCoefficients : Error {
  using Error::Error;
};

// A channel image E(rho) or E(sigma) is singular where faithfulness is required.
struct ImageNotFaithful : Error {
  using Error::Error;
};

// Unitary completion of a dilation isometry failed to produce a unitary.
struct CompletionFailure : Error {
  using Error::Error;
};

// A mathematically guaranteed implication between certificate verdicts failed,
// which indicates a numerical or implementation defect, never a property of
// admissible inputs.
struct TheoremViolation : Error {
  using Error::Error;
};

}  // namespace alphaz
