#pragma once

#include <stdexcept>
#include <string>

namespace sasaki {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Annulus half-width outside the open interval (0, pi/2).
class DegenerateAnnulus : public Error {
 public:
  using Error::Error;
};

/// Evaluation point outside the declared domain of a field.
class OutOfDomain : public Error {
 public:
  using Error::Error;
};

/// Latitude outside [-alpha0, alpha0] where the annulus algebra requires a
/// nonnegative radicand.
class OutsideAnnulus : public Error {
 public:
  using Error::Error;
};

/// Closed-form minimizer slope requested at (or numerically indistinguishable
/// from) the annulus boundary, where it diverges.
class BoundarySingularity : public Error {
 public:
  using Error::Error;
};

/// Winding-number tracking failed to land near an integer.
class NonIntegralWinding : public Error {
 public:
  using Error::Error;
};

/// The two algebraically identical integrand forms disagreed beyond
/// tolerance; signals a derivative bug upstream.
class IdentityViolation : public Error {
 public:
  using Error::Error;
};

/// Adaptive refinement exceeded its evaluation budget.
class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

/// A non-minimizer field exposed a non-integrable slope blow-up to the
/// axisymmetric integrator.
class SingularIntegrand : public Error {
 public:
  using Error::Error;
};

/// Index class k in {0, 2}: the reference ellipse degenerates to a segment
/// and no bound is available.
class ExcludedIndex : public Error {
 public:
  using Error::Error;
};

/// Grid-field CSV did not parse or violated the format contract.
class GridParseError : public Error {
 public:
  using Error::Error;
};

/// Generic precondition violation not covered by a more specific type.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace sasaki
