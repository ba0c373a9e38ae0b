#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "sasaki/errors.hpp"
#include "sasaki/fields.hpp"
#include "sasaki/sphere_domain.hpp"

namespace sasaki {

/// Parameters of the sharp closed-form minimizer: the band half-width plus
/// the integration constant fixed to pi/2 by the equator condition
/// theta(0, beta) = pi/2.
struct MinimizerSpec {
  AnnulusSpec annulus;
  double integration_constant = kPi / 2.0;
};

inline MinimizerSpec make_minimizer_spec(const AnnulusSpec& a) {
  return MinimizerSpec{make_annulus(a.alpha0), kPi / 2.0};
}

/// The sharp minimizer angle theta(alpha) = arcsin(cot(alpha0) tan(alpha)) + pi/2,
/// monotone increasing from 0 at -alpha0 to pi at alpha0.
/// Throws OutsideAnnulus when |cot(alpha0) tan(alpha)| > 1 + 1e-12.
template <typename Scalar = double>
Scalar minimizer_angle(Scalar alpha, const AnnulusSpec& a) {
  using std::asin;
  using std::tan;
  const Scalar ratio = tan(alpha) / tan(static_cast<Scalar>(a.alpha0));
  if (std::abs(ratio) > Scalar(1) + Scalar(1e-12))
    throw OutsideAnnulus("minimizer angle requested outside the band");
  const Scalar clamped = std::clamp(ratio, Scalar(-1), Scalar(1));
  return asin(clamped) + static_cast<Scalar>(kPi) / Scalar(2);
}

namespace detail {

/// Unchecked slope formula cos(alpha0) / (cos(alpha) sqrt(cos^2 alpha - cos^2 alpha0)).
/// Returns +inf at |alpha| = alpha0; quadrature layers never evaluate there.
template <typename Scalar>
Scalar minimizer_slope_formula(Scalar alpha, const AnnulusSpec& a) {
  using std::cos;
  using std::sqrt;
  const Scalar a0 = static_cast<Scalar>(a.alpha0);
  const Scalar radicand = cos_sq_minus_cos_sq(alpha, a0);
  return cos(a0) / (cos(alpha) * sqrt(radicand));
}

}  // namespace detail

/// The minimizer slope theta2(alpha) = cos(alpha0) / (cos(alpha) sqrt(cos^2 alpha - cos^2 alpha0)),
/// always positive, diverging at the band boundary.
/// Throws BoundarySingularity for |alpha| > alpha0 - 1e-9.
template <typename Scalar = double>
Scalar minimizer_slope(Scalar alpha, const AnnulusSpec& a) {
  if (std::abs(alpha) > static_cast<Scalar>(a.alpha0) - Scalar(1e-9))
    throw BoundarySingularity("minimizer slope diverges at the band boundary");
  return detail::minimizer_slope_formula(alpha, a);
}

/// Angle of the k-indexed family: theta(alpha, beta) = (k-1) beta + pi/2,
/// turning k-1 times along each parallel and parallel along meridians.
inline double vk_angle(int k, const LatLon& p) {
  return (k - 1.0) * p.beta + kPi / 2.0;
}

/// Geometry of the reference ellipse x^2/k^2 + y^2/(k-2)^2 = 1 for an index
/// class k, with the induced area bound pi * perimeter.
struct EllipseBound {
  int k = 0;
  std::pair<double, double> semi_axes;  // (|k|, |k-2|)
  double perimeter = 0.0;
  double bound = 0.0;  // pi * perimeter
};

/// Perimeter of the ellipse with semi-axes |k| and |k-2| via the
/// arithmetic-geometric mean form of the complete elliptic integral of the
/// second kind; relative error below 1e-12.
/// Throws ExcludedIndex for k in {0, 2} (degenerate ellipse).
inline double ellipse_perimeter(int k) {
  if (k == 0 || k == 2)
    throw ExcludedIndex("no reference ellipse for k = " + std::to_string(k));
  const double a = std::max(std::abs(k), std::abs(k - 2));
  const double b = std::min(std::abs(k), std::abs(k - 2));
  if (a == b) return kTwoPi * a;
  // E(e) via AGM: K = pi / (2 agm(1, b/a)), E = K (1 - sum 2^(n-1) c_n^2).
  double x = 1.0, y = b / a;
  double c2_sum = 0.5 * (1.0 - y * y);  // 2^(-1) c_0^2 with c_0^2 = 1 - (b/a)^2
  double pow2 = 1.0;
  for (int n = 0; n < 64; ++n) {
    const double c = 0.5 * (x - y);  // c_{n+1}, weighted 2^n
    c2_sum += pow2 * c * c;
    const double xn = 0.5 * (x + y);
    y = std::sqrt(x * y);
    x = xn;
    pow2 *= 2.0;
    if (std::abs(x - y) < 1e-17 * x) break;
  }
  const double complete_k = kPi / (2.0 * x);
  const double complete_e = complete_k * (1.0 - c2_sum);
  return 4.0 * a * complete_e;
}

inline EllipseBound ellipse_bound(int k) {
  EllipseBound e;
  e.k = k;
  e.semi_axes = {std::abs(k), std::abs(k - 2)};
  e.perimeter = ellipse_perimeter(k);
  e.bound = kPi * e.perimeter;
  return e;
}

/// The two reference lower bounds for the index class k on the twice-punctured
/// sphere: bcj = (pi + |k| + |2-k| - 2)/2 * 4pi from the index inequality, and
/// bcgn = pi * L(ellipse_k) from the ellipse-length inequality.
struct ReferenceBounds {
  double bcj = 0.0;
  double bcgn = 0.0;
};

inline ReferenceBounds reference_bounds(int k) {
  ReferenceBounds r;
  r.bcgn = kPi * ellipse_perimeter(k);  // throws ExcludedIndex for k in {0, 2}
  r.bcj = 0.5 * (kPi + std::abs(k) + std::abs(2 - k) - 2.0) * 4.0 * kPi;
  return r;
}

/// The closed-form minimizer as an angle field. Carries exact partials and
/// the analytic substituted reduced integrand, which is identically 1:
/// sqrt(1 + cos^2(a) theta2^2) da = da / sqrt(1 - (sin a / sin a0)^2) ... = du
/// under sin a = sin a0 sin u.
inline AngleField minimizer_field(const AnnulusSpec& a) {
  const AnnulusSpec ann = make_annulus(a.alpha0);
  return AngleField::closed_form(
             FieldDomain::annulus(ann),
             [ann](double alpha, double) { return minimizer_angle(alpha, ann); },
             [ann](double alpha, double) { return detail::minimizer_slope_formula(alpha, ann); },
             [](double, double) { return 0.0; },
             /*axisymmetric=*/true)
      .with_endpoint_singular_slope(true)
      .with_substituted_integrand([](double) { return 1.0; });
}

inline AngleField minimizer_field(const MinimizerSpec& spec) {
  return minimizer_field(spec.annulus);
}

/// The constant field theta = theta0 on a band.
inline AngleField constant_field(const AnnulusSpec& a, double theta0 = kPi / 2.0) {
  return AngleField::closed_form(
      FieldDomain::annulus(make_annulus(a.alpha0)),
      [theta0](double, double) { return theta0; }, [](double, double) { return 0.0; },
      [](double, double) { return 0.0; }, /*axisymmetric=*/true);
}

/// The k-indexed field on the twice-punctured sphere.
inline AngleField vk_field(int k) {
  return AngleField::closed_form(
      FieldDomain::punctured_sphere(),
      [k](double, double beta) { return (k - 1.0) * beta + kPi / 2.0; },
      [](double, double) { return 0.0; }, [k](double, double) { return k - 1.0; },
      /*axisymmetric=*/k == 1);
}

/// The minimizer plus eps * sin(pi (alpha + alpha0) / (2 alpha0)): a pinned
/// perturbation used by the optimality checks. The slope keeps the
/// inverse-square-root divergence, so area integration still substitutes.
/// The reduced integrand again collapses to closed form: with the bounded
/// bump slope b(alpha) and p = eps b sin(a0) cos(u) it equals
/// sqrt(1 + p (2 cos(a0)/cos(alpha) + p)), a sum of squares under the root.
/// Attaching it matters: reducing the raw slope through alpha = asin(...)
/// loses the endpoint cancellation to roundoff in alpha, and the resulting
/// noise defeats adaptive cross-checks near u = +-pi/2.
inline AngleField perturbed_minimizer_field(const AnnulusSpec& a, double eps) {
  const AnnulusSpec ann = make_annulus(a.alpha0);
  const double freq = kPi / (2.0 * ann.alpha0);
  const double s0 = std::sin(ann.alpha0);
  const double c0 = std::cos(ann.alpha0);
  return AngleField::closed_form(
             FieldDomain::annulus(ann),
             [ann, eps, freq](double alpha, double) {
               return minimizer_angle(alpha, ann) + eps * std::sin(freq * (alpha + ann.alpha0));
             },
             [ann, eps, freq](double alpha, double) {
               return detail::minimizer_slope_formula(alpha, ann) +
                      eps * freq * std::cos(freq * (alpha + ann.alpha0));
             },
             [](double, double) { return 0.0; },
             /*axisymmetric=*/true)
      .with_endpoint_singular_slope(true)
      .with_substituted_integrand([ann, eps, freq, s0, c0](double u) {
        const double cu = std::cos(u);
        const double ca = std::sqrt(c0 * c0 + s0 * s0 * cu * cu);
        const double alpha = std::asin(s0 * std::sin(u));
        const double bump = freq * std::cos(freq * (alpha + ann.alpha0));
        const double p = eps * bump * s0 * cu;
        return std::sqrt(1.0 + p * (2.0 * c0 / ca + p));
      });
}

}  // namespace sasaki
