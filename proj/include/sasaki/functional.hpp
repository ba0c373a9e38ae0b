#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <variant>

#include "sasaki/errors.hpp"
#include "sasaki/fields.hpp"
#include "sasaki/quadrature.hpp"
#include "sasaki/sphere_domain.hpp"

namespace sasaki {

/// Result of an area computation, with the band lower bound attached when the
/// field lives on a band (NaN on the punctured sphere, where the index-class
/// bounds apply instead).
struct AreaReport {
  double area = 0.0;
  double lower_bound = std::numeric_limits<double>::quiet_NaN();
  double k_constant = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  QuadratureScheme scheme_used;
  double estimated_quadrature_error = 0.0;
};

/// True when the report violates its own bound beyond quadrature error —
/// an internal inconsistency, never expected.
inline bool bound_violated(const AreaReport& r) {
  return std::isfinite(r.lower_bound) && r.gap < -(r.estimated_quadrature_error + 1e-9);
}

/// The area integrand sqrt(1 + gamma^2 + delta^2), cross-checked against its
/// algebraically identical form sqrt(1 + (tan(alpha) + theta1)^2 + theta2^2).
/// Throws IdentityViolation if the two disagree beyond 1e-10 (derivative bug).
inline double pointwise_integrand(const AngleField& f, const LatLon& p) {
  const CurvaturePair k = geodesic_curvatures(f, p);
  const DerivativePair d = directional_derivatives(f, p);
  const double t = std::tan(p.alpha) + d.theta1;
  const double from_curvatures = std::sqrt(1.0 + k.gamma * k.gamma + k.delta * k.delta);
  const double from_derivatives = std::sqrt(1.0 + t * t + d.theta2 * d.theta2);
  if (std::abs(from_curvatures - from_derivatives) > 1e-10)
    throw IdentityViolation("integrand forms disagree: derivative bug upstream");
  return from_curvatures;
}

/// The integrand premultiplied by the area element factor cos(alpha), in the
/// cancellation-safe form sqrt(cos^2 a + (sin a + cos a * theta1)^2 + (cos a * theta2)^2)
/// that stays bounded toward the poles.
inline double integrand_times_cos_alpha(const AngleField& f, double alpha, double beta) {
  const double c = std::cos(alpha), s = std::sin(alpha);
  const double th1 = f.axisymmetric() ? 0.0 : f.dtheta_dbeta_raw(alpha, beta) / c;
  const double th2 = f.dtheta_dalpha_raw(alpha, beta);
  const double x = s + c * th1;
  const double y = c * th2;
  return std::sqrt(c * c + x * x + y * y);
}

/// The J = H + I split of the reduced integrand square at a latitude:
///   H = (sqrt(1 - cos^2 a0 sec^2 a) + cos(a0) theta2)^2,
///   I = (-cos(a0) sec(a) + sqrt(1 - cos^2 a0 sec^2 a) cos(a) theta2)^2,
/// with H + I = 1 + cos^2(a) theta2^2 identically.
/// Throws OutsideAnnulus when |alpha| > alpha0 (negative radicand).
struct HiSplit {
  double H = 0.0;
  double I = 0.0;
};

inline HiSplit hi_split(double alpha, const AnnulusSpec& a, double theta2) {
  const double c = std::cos(alpha), c0 = std::cos(a.alpha0);
  const double num = cos_sq_minus_cos_sq(alpha, a.alpha0);  // cos^2 a - cos^2 a0
  if (num < 0.0)
    throw OutsideAnnulus("hi_split radicand negative: |alpha| exceeds alpha0");
  const double root = std::sqrt(num) / c;  // sqrt(1 - cos^2 a0 sec^2 a)
  const double h = root + c0 * theta2;
  const double i = -c0 / c + root * c * theta2;
  return HiSplit{h * h, i * i};
}

/// The band lower bound: K = 2 pi * int sqrt(1 - cos^2 a0 sec^2 a) da over
/// [-a0, a0], and bound = K + 2 pi^2 cos(a0). With endpoint substitution the
/// K integrand becomes sin^2(a0) cos^2(u) / (1 - sin^2(a0) sin^2(u)), smooth
/// on [-pi/2, pi/2]; without it the integrand's derivative diverges at the
/// ends and convergence is slow.
struct BoundResult {
  double K = 0.0;
  double bound = 0.0;
};

inline BoundResult lower_bound(const AnnulusSpec& a, const QuadratureScheme& q) {
  make_annulus(a.alpha0);  // validate
  validate(q);
  const double a0 = a.alpha0, s0 = std::sin(a.alpha0), c0 = std::cos(a.alpha0);
  double integral = 0.0;
  if (q.endpoint_substitution) {
    // Denominator in the cancellation-free form 1 - s0^2 sin^2 u =
    // cos^2 a0 + s0^2 cos^2 u: near the pole-touching limit the naive form
    // loses all significant digits at the endpoints.
    auto h = [s0, c0](double u) {
      const double cu = std::cos(u);
      const double num = s0 * s0 * cu * cu;
      return num / (c0 * c0 + num);
    };
    integral = integrate(q, h, -kPi / 2.0, kPi / 2.0);
  } else {
    auto g = [a0](double alpha) {
      const double num = std::max(cos_sq_minus_cos_sq(alpha, a0), 0.0);
      return std::sqrt(num) / std::cos(alpha);
    };
    integral = integrate(q, g, -a0, a0);
  }
  BoundResult r;
  r.K = kTwoPi * integral;
  r.bound = r.K + kTwoPiSquared * c0;
  return r;
}

/// The conjectured closed form K = 2 pi^2 (1 - cos a0), audited (never
/// assumed) against quadrature.
inline double conjectured_k_closed_form(double alpha0) {
  return kTwoPiSquared * (1.0 - std::cos(alpha0));
}

/// Reduced area of an axisymmetric field: 2 pi * int sqrt(1 + cos^2 a * theta2^2) da
/// over the band. Fields with an endpoint-divergent slope are integrated in
/// the substituted variable u (sin a = sin a0 sin u); fields carrying an
/// analytic substituted integrand use it directly.
/// Throws SingularIntegrand when a divergent slope meets a rule that would
/// sample the divergence, or when any sampled value is non-finite.
inline double axisymmetric_area(const AngleField& f, const AnnulusSpec& a,
                                const QuadratureScheme& q) {
  validate(q);
  if (!f.axisymmetric())
    throw InvalidArgument("axisymmetric_area requires a field with theta1 = 0");
  if (!f.domain().contains(a.alpha0) || !f.domain().contains(-a.alpha0))
    throw OutOfDomain("field does not cover the requested band");
  const double a0 = a.alpha0;
  auto g = [&f](double alpha) {
    const double t2 = f.dtheta_dalpha_raw(alpha, kPi);
    const double c = std::cos(alpha);
    const double v = std::sqrt(1.0 + c * c * t2 * t2);
    if (!std::isfinite(v))
      throw SingularIntegrand("non-finite reduced integrand sample");
    return v;
  };
  const bool substitute =
      q.endpoint_substitution && (f.substituted_integrand() || f.endpoint_singular_slope());
  if (substitute) {
    const double s0 = std::sin(a0), c0 = std::cos(a0);
    std::function<double(double)> h;
    if (const auto* analytic = f.substituted_integrand()) {
      h = *analytic;
    } else {
      h = [g, s0, c0](double u) {
        const double cu = std::cos(u);
        const double alpha = std::asin(s0 * std::sin(u));
        // cos(alpha) in the cancellation-free form sqrt(cos^2 a0 +
        // s0^2 cos^2 u); the naive 1 - s0^2 sin^2 u loses precision near the
        // pole-touching limit.
        const double ca = std::sqrt(c0 * c0 + s0 * s0 * cu * cu);
        return g(alpha) * s0 * cu / ca;
      };
    }
    double lo = -kPi / 2.0, hi = kPi / 2.0;
    // An endpoint-evaluating rule must not sample u = +-pi/2, where the
    // generic change of variables hits the divergent slope head-on.
    if (std::holds_alternative<AdaptiveSimpsonRule>(q.rule) && !f.substituted_integrand()) {
      lo += 1e-9;
      hi -= 1e-9;
    }
    return kTwoPi * integrate(q, h, lo, hi);
  }
  if (f.endpoint_singular_slope() && std::holds_alternative<AdaptiveSimpsonRule>(q.rule))
    throw SingularIntegrand(
        "endpoint-divergent slope needs endpoint substitution for this rule");
  return kTwoPi * integrate(q, g, -a0, a0);
}

namespace detail {

/// One latitude's worth of the 2D integral: int over beta in (0, 2pi] of the
/// premultiplied integrand, by a fixed Gauss-Legendre pass (exact for fields
/// whose derivatives do not depend on beta).
inline double beta_integral(const AngleField& f, double alpha) {
  static thread_local Eigen::VectorXd x, w;
  if (x.size() == 0) gauss_legendre_nodes(16, x, w);
  const int panels = 8;
  std::vector<double> terms;
  terms.reserve(16 * panels);
  const double h = kTwoPi / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * h;
    for (int i = 0; i < 16; ++i)
      terms.push_back(0.5 * h * w[i] *
                      integrand_times_cos_alpha(f, alpha, normalize_beta(mid + 0.5 * h * x[i])));
  }
  return pairwise_sum(terms);
}

inline double area_value(const AngleField& f, double alpha_lo, double alpha_hi,
                         const QuadratureScheme& q, const AnnulusSpec* band) {
  if (f.axisymmetric() && band != nullptr) return axisymmetric_area(f, *band, q);
  auto outer = [&f](double alpha) { return beta_integral(f, alpha); };
  return integrate(q, outer, alpha_lo, alpha_hi);
}

inline QuadratureScheme cross_check_scheme(const QuadratureScheme& q) {
  QuadratureScheme other = q;
  if (std::holds_alternative<GaussLegendreRule>(q.rule))
    other.rule = AdaptiveSimpsonRule{};
  else
    other.rule = GaussLegendreRule{};
  return other;
}

}  // namespace detail

/// Full area report of a field over a band: the 2D integral
/// area = int int sqrt(1 + (tan a + theta1)^2 + theta2^2) cos(a) dbeta da,
/// delegating to axisymmetric_area when theta1 = 0. The estimated quadrature
/// error is the difference against the cross-check scheme.
inline AreaReport area(const AngleField& f, const AnnulusSpec& a, const QuadratureScheme& q) {
  validate(q);
  make_annulus(a.alpha0);
  if (!f.domain().contains(a.alpha0) || !f.domain().contains(-a.alpha0))
    throw OutOfDomain("field does not cover the requested band");
  AreaReport r;
  r.scheme_used = q;
  r.area = detail::area_value(f, -a.alpha0, a.alpha0, q, &a);
  const double other = detail::area_value(f, -a.alpha0, a.alpha0, detail::cross_check_scheme(q), &a);
  r.estimated_quadrature_error = std::abs(r.area - other);
  const BoundResult b = lower_bound(a, q);
  r.k_constant = b.K;
  r.lower_bound = b.bound;
  r.gap = r.area - b.bound;
  return r;
}

/// Area report over the field's own domain: band fields get the band report,
/// punctured-sphere fields are integrated over all latitudes (the
/// premultiplied integrand stays bounded toward the poles, so the improper
/// integral needs no pole cutoff).
inline AreaReport area(const AngleField& f, const QuadratureScheme& q) {
  if (f.domain().kind == DomainKind::Annulus)
    return area(f, AnnulusSpec{f.domain().alpha0}, q);
  validate(q);
  AreaReport r;
  r.scheme_used = q;
  const double half = kPi / 2.0;
  auto outer = [&f](double alpha) { return detail::beta_integral(f, alpha); };
  r.area = integrate(q, outer, -half, half);
  QuadratureScheme other = detail::cross_check_scheme(q);
  r.estimated_quadrature_error = std::abs(r.area - integrate(other, outer, -half, half));
  return r;
}

}  // namespace sasaki
