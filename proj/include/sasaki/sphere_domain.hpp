#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Core>

#include "sasaki/errors.hpp"

namespace sasaki {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
/// 2*pi^2, the area of the unit tangent sublevel attained by the sharp bound
/// in the limiting cases; appears throughout the tests.
inline constexpr double kTwoPiSquared = 2.0 * std::numbers::pi * std::numbers::pi;

/// Normalizes a longitude into the canonical half-open interval (0, 2*pi].
template <typename Scalar>
Scalar normalize_beta(Scalar beta) {
  const Scalar two_pi = static_cast<Scalar>(kTwoPi);
  Scalar b = std::fmod(beta, two_pi);
  if (b <= Scalar(0)) b += two_pi;
  return b;
}

/// A point of the unit sphere in latitude/longitude coordinates.
/// Latitude alpha lies strictly between the poles; longitude beta is stored
/// normalized into (0, 2*pi].
template <typename Scalar>
struct LatLonT {
  Scalar alpha{};
  Scalar beta{};

  LatLonT() = default;
  LatLonT(Scalar alpha_, Scalar beta_) : alpha(alpha_), beta(normalize_beta(beta_)) {
    if (!(std::abs(alpha_) < static_cast<Scalar>(kPi) / Scalar(2)))
      throw OutOfDomain("latitude must lie strictly between the poles");
  }
};

using LatLon = LatLonT<double>;

/// The spherical annulus A_{alpha0}: latitudes in [-alpha0, alpha0].
struct AnnulusSpec {
  double alpha0{};
};

/// Validates the half-width and builds the annulus descriptor.
/// Throws DegenerateAnnulus unless 0 < alpha0 < pi/2.
inline AnnulusSpec make_annulus(double alpha0) {
  if (!(alpha0 > 0.0) || !(alpha0 < kPi / 2.0))
    throw DegenerateAnnulus("alpha0 must lie in (0, pi/2), got " + std::to_string(alpha0));
  return AnnulusSpec{alpha0};
}

/// cos^2(alpha) - cos^2(alpha0), evaluated in the product form
/// 2 sin((alpha+alpha0)/2) sin((alpha0-alpha)/2) (cos(alpha) + cos(alpha0))
/// which keeps full relative accuracy near |alpha| = alpha0 where the naive
/// difference cancels catastrophically.
template <typename Scalar>
Scalar cos_sq_minus_cos_sq(Scalar alpha, Scalar alpha0) {
  using std::cos;
  using std::sin;
  return Scalar(2) * sin((alpha + alpha0) / Scalar(2)) * sin((alpha0 - alpha) / Scalar(2)) *
         (cos(alpha) + cos(alpha0));
}

/// Orthonormal frame at a point: e1 tangent to the parallel (increasing
/// beta), e2 tangent to the meridian (increasing alpha), {e1, e2, point}
/// positively oriented.
template <typename Scalar>
struct Frame3T {
  Eigen::Matrix<Scalar, 3, 1> point;
  Eigen::Matrix<Scalar, 3, 1> e1;
  Eigen::Matrix<Scalar, 3, 1> e2;
};

using Frame3 = Frame3T<double>;

/// Realizes the frame in ambient coordinates from the embedding
/// (cos a cos b, cos a sin b, sin a); e1 and e2 are the normalized
/// coordinate derivatives, orthonormal by construction.
template <typename Scalar>
Frame3T<Scalar> frame_at(const LatLonT<Scalar>& p) {
  using std::cos;
  using std::sin;
  const Scalar ca = cos(p.alpha), sa = sin(p.alpha);
  const Scalar cb = cos(p.beta), sb = sin(p.beta);
  Frame3T<Scalar> f;
  f.point << ca * cb, ca * sb, sa;
  f.e1 << -sb, cb, Scalar(0);
  f.e2 << -sa * cb, -sa * sb, ca;
  return f;
}

}  // namespace sasaki
