#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sasaki/errors.hpp"
#include "sasaki/sphere_domain.hpp"

namespace sasaki {

/// Shortest signed distance of x to the nearest multiple of 2*pi, in [-pi, pi].
inline double wrap_to_pi(double x) {
  return x - kTwoPi * std::round(x / kTwoPi);
}

enum class FieldKind { ClosedForm, Grid };
enum class DomainKind { Annulus, PuncturedSphere };

/// Domain marker for an angle field: a latitude band or the twice-punctured
/// sphere (all latitudes strictly between the poles).
struct FieldDomain {
  DomainKind kind = DomainKind::Annulus;
  double alpha0 = 0.0;  // band half-width; pi/2 for the punctured sphere

  static FieldDomain annulus(const AnnulusSpec& a) {
    return FieldDomain{DomainKind::Annulus, a.alpha0};
  }
  static FieldDomain punctured_sphere() {
    return FieldDomain{DomainKind::PuncturedSphere, kPi / 2.0};
  }
  bool contains(double alpha) const {
    if (kind == DomainKind::Annulus) return std::abs(alpha) <= alpha0;
    return std::abs(alpha) < kPi / 2.0;
  }
};

namespace detail {

/// Natural cubic spline in second-derivative form. For two points it
/// degenerates to the linear interpolant whose slope doubles as the
/// finite-difference derivative fallback.
struct CubicSpline {
  Eigen::VectorXd x, y, m;  // m: second derivatives at the knots (natural: ends 0)

  void build(Eigen::VectorXd xs, Eigen::VectorXd ys) {
    x = std::move(xs);
    y = std::move(ys);
    const Eigen::Index n = x.size();
    m = Eigen::VectorXd::Zero(n);
    if (n < 3) return;
    // Thomas algorithm on the interior tridiagonal system.
    const Eigen::Index k = n - 2;
    Eigen::VectorXd diag(k), sub(k), sup(k), rhs(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      const double h0 = x[i + 1] - x[i], h1 = x[i + 2] - x[i + 1];
      sub[i] = h0 / 6.0;
      diag[i] = (h0 + h1) / 3.0;
      sup[i] = h1 / 6.0;
      rhs[i] = (y[i + 2] - y[i + 1]) / h1 - (y[i + 1] - y[i]) / h0;
    }
    for (Eigen::Index i = 1; i < k; ++i) {
      const double w = sub[i] / diag[i - 1];
      diag[i] -= w * sup[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    m[k] = rhs[k - 1] / diag[k - 1];
    for (Eigen::Index i = k - 1; i >= 1; --i)
      m[i] = (rhs[i - 1] - sup[i - 1] * m[i + 1]) / diag[i - 1];
  }

  Eigen::Index segment(double t) const {
    auto it = std::upper_bound(x.data(), x.data() + x.size(), t);
    Eigen::Index i = (it - x.data()) - 1;
    return std::clamp<Eigen::Index>(i, 0, x.size() - 2);
  }

  double eval(double t) const {
    const Eigen::Index i = segment(t);
    const double h = x[i + 1] - x[i];
    const double a = (x[i + 1] - t) / h, b = (t - x[i]) / h;
    return a * y[i] + b * y[i + 1] +
           ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0;
  }

  double deriv(double t) const {
    const Eigen::Index i = segment(t);
    const double h = x[i + 1] - x[i];
    const double a = (x[i + 1] - t) / h, b = (t - x[i]) / h;
    return (y[i + 1] - y[i]) / h +
           (-(3.0 * a * a - 1.0) * m[i] + (3.0 * b * b - 1.0) * m[i + 1]) * h / 6.0;
  }
};

}  // namespace detail

/// A unit vector field V = cos(theta) e1 + sin(theta) e2 encoded by its angle
/// function. Closed-form fields carry exact partial-derivative callables;
/// grid fields hold axisymmetric samples interpolated by a natural cubic
/// spline. Immutable after construction; evaluation is pure.
class AngleField {
 public:
  using Fn2 = std::function<double(double, double)>;  // (alpha, beta) -> value
  using Fn1 = std::function<double(double)>;

  static AngleField closed_form(FieldDomain dom, Fn2 theta, Fn2 dtheta_dalpha, Fn2 dtheta_dbeta,
                                bool axisymmetric) {
    AngleField f;
    f.kind_ = FieldKind::ClosedForm;
    f.domain_ = dom;
    f.theta_ = std::move(theta);
    f.dalpha_ = std::move(dtheta_dalpha);
    f.dbeta_ = std::move(dtheta_dbeta);
    f.axisymmetric_ = axisymmetric;
    return f;
  }

  /// Axisymmetric sampled field. Latitudes must be strictly increasing and
  /// lie inside [-alpha0, alpha0]; angle values must be finite.
  static AngleField grid(const AnnulusSpec& a, Eigen::VectorXd latitudes,
                         Eigen::VectorXd thetas) {
    if (latitudes.size() != thetas.size() || latitudes.size() < 2)
      throw InvalidArgument("grid field needs >= 2 matching latitude/theta samples");
    for (Eigen::Index i = 0; i < latitudes.size(); ++i) {
      if (!std::isfinite(latitudes[i]) || !std::isfinite(thetas[i]))
        throw InvalidArgument("grid field samples must be finite");
      if (i > 0 && !(latitudes[i] > latitudes[i - 1]))
        throw InvalidArgument("grid field latitudes must be strictly increasing");
      if (std::abs(latitudes[i]) > a.alpha0)
        throw InvalidArgument("grid field latitudes must lie inside [-alpha0, alpha0]");
    }
    AngleField f;
    f.kind_ = FieldKind::Grid;
    f.domain_ = FieldDomain::annulus(a);
    f.axisymmetric_ = true;
    f.spline_.build(std::move(latitudes), std::move(thetas));
    return f;
  }

  FieldKind kind() const { return kind_; }
  const FieldDomain& domain() const { return domain_; }
  bool axisymmetric() const { return axisymmetric_; }

  /// True when the slope diverges at the domain boundary (inverse-square-root
  /// blow-up), so area integration should change variables first.
  bool endpoint_singular_slope() const { return endpoint_singular_; }
  AngleField&& with_endpoint_singular_slope(bool v) && {
    endpoint_singular_ = v;
    return std::move(*this);
  }

  /// Analytic substituted reduced integrand h(u), when the field knows the
  /// closed form of sqrt(1 + cos^2(a) theta2^2) da under sin a = sin a0 sin u.
  const Fn1* substituted_integrand() const {
    return substituted_ ? &substituted_ : nullptr;
  }
  AngleField&& with_substituted_integrand(Fn1 h) && {
    substituted_ = std::move(h);
    return std::move(*this);
  }

  /// Raw accessors: no domain checks (quadrature layers clamp and call these
  /// directly; user-facing checks live in the free functions below).
  double theta_raw(double alpha, double beta) const {
    return kind_ == FieldKind::ClosedForm ? theta_(alpha, beta) : spline_.eval(alpha);
  }
  double dtheta_dalpha_raw(double alpha, double beta) const {
    return kind_ == FieldKind::ClosedForm ? dalpha_(alpha, beta) : spline_.deriv(alpha);
  }
  double dtheta_dbeta_raw(double alpha, double beta) const {
    return kind_ == FieldKind::ClosedForm ? dbeta_(alpha, beta) : 0.0;
  }

  /// Grid sample access (empty for closed-form fields).
  const Eigen::VectorXd& grid_latitudes() const { return spline_.x; }
  const Eigen::VectorXd& grid_thetas() const { return spline_.y; }

 private:
  AngleField() = default;

  FieldKind kind_ = FieldKind::ClosedForm;
  FieldDomain domain_{};
  Fn2 theta_, dalpha_, dbeta_;
  bool axisymmetric_ = false;
  bool endpoint_singular_ = false;
  Fn1 substituted_;
  detail::CubicSpline spline_;
};

/// theta1 = d(theta)(e1) = (d theta/d beta)/cos(alpha); theta2 = d theta/d alpha.
struct DerivativePair {
  double theta1 = 0.0;
  double theta2 = 0.0;
};

/// Geodesic curvatures of the integral curves of V (gamma) and of the
/// orthogonal field (delta).
struct CurvaturePair {
  double gamma = 0.0;
  double delta = 0.0;
};

enum class Pole { N, S };

/// Result of the band boundary-condition check.
struct BoundaryReport {
  bool tangent = false;        // sin(theta) = 0 on both boundary parallels
  bool antipodal = false;      // theta(-a0,.) = 0 and theta(a0,.) = pi (mod 2pi)
  bool perpendicular = false;  // cos(theta) = 0 on the equator
  double max_violation = 0.0;  // largest residual over all three checks
};

/// Returns theta(p); spline interpolation for grid fields.
inline double eval_angle(const AngleField& f, const LatLon& p) {
  if (!f.domain().contains(p.alpha))
    throw OutOfDomain("latitude outside the field domain");
  return f.theta_raw(p.alpha, p.beta);
}

/// Frame-adapted derivatives of the angle at an interior point.
inline DerivativePair directional_derivatives(const AngleField& f, const LatLon& p) {
  if (!f.domain().contains(p.alpha))
    throw OutOfDomain("latitude outside the field domain");
  DerivativePair d;
  d.theta2 = f.dtheta_dalpha_raw(p.alpha, p.beta);
  d.theta1 = f.axisymmetric() ? 0.0 : f.dtheta_dbeta_raw(p.alpha, p.beta) / std::cos(p.alpha);
  return d;
}

/// Geodesic curvatures
///   gamma = cos(theta)(tan(alpha) + theta1) + sin(theta) theta2,
///   delta = sin(theta)(tan(alpha) + theta1) - cos(theta) theta2.
inline CurvaturePair geodesic_curvatures(const AngleField& f, const LatLon& p) {
  const double th = eval_angle(f, p);
  const DerivativePair d = directional_derivatives(f, p);
  const double t = std::tan(p.alpha) + d.theta1;
  const double c = std::cos(th), s = std::sin(th);
  return CurvaturePair{c * t + s * d.theta2, s * t - c * d.theta2};
}

/// Poincare index at a pole: 1 + w at N and 1 - w at S, where w is the
/// winding number of theta along the parallel at loop_latitude, traversed in
/// increasing beta. The continuous angle is tracked by nearest-branch
/// unwrapping of successive samples; at least 720 samples are used.
/// Throws NonIntegralWinding if the unrounded index strays more than 0.1
/// from an integer.
inline int poincare_index(const AngleField& f, Pole pole, double loop_latitude,
                          int samples = 1440) {
  if (!f.domain().contains(loop_latitude))
    throw OutOfDomain("loop latitude outside the field domain");
  samples = std::max(samples, 720);
  // Traverse the loop on the covering line (beta from 0 to 2 pi, not
  // normalized): a field whose angle gains a non-multiple of 2 pi per loop
  // has no continuous closed direction, and normalizing beta would silently
  // close the sampled loop and hide that.
  double turn = 0.0;
  double prev = f.theta_raw(loop_latitude, 0.0);
  for (int j = 1; j <= samples; ++j) {
    const double cur = f.theta_raw(loop_latitude, kTwoPi * j / samples);
    turn += wrap_to_pi(cur - prev);
    prev = cur;
  }
  const double w = turn / kTwoPi;
  const double raw = (pole == Pole::N) ? 1.0 + w : 1.0 - w;
  const double rounded = std::round(raw);
  if (std::abs(raw - rounded) > 0.1)
    throw NonIntegralWinding("winding did not land near an integer; grid too coarse?");
  return static_cast<int>(rounded);
}

/// Checks the band hypotheses by sampling beta over (0, 2pi]:
/// tangency |sin theta(+-a0, .)|, antipodal opposition theta(-a0,.) = 0 and
/// theta(a0,.) = pi (mod 2pi), equator perpendicularity |cos theta(0, .)|.
inline BoundaryReport check_boundary_conditions(const AngleField& f, const AnnulusSpec& a,
                                                double tol, int samples = 256) {
  if (!f.domain().contains(a.alpha0) || !f.domain().contains(-a.alpha0))
    throw OutOfDomain("field is not defined on the requested band");
  double tangent_res = 0.0, antipodal_res = 0.0, perp_res = 0.0;
  for (int j = 0; j < samples; ++j) {
    const double beta = kTwoPi * (j + 1.0) / samples;
    const double th_n = f.theta_raw(-a.alpha0, beta);
    const double th_p = f.theta_raw(a.alpha0, beta);
    const double th_0 = f.theta_raw(0.0, beta);
    tangent_res = std::max({tangent_res, std::abs(std::sin(th_n)), std::abs(std::sin(th_p))});
    antipodal_res = std::max({antipodal_res, std::abs(wrap_to_pi(th_n)),
                              std::abs(wrap_to_pi(th_p - kPi))});
    perp_res = std::max(perp_res, std::abs(std::cos(th_0)));
  }
  BoundaryReport r;
  r.tangent = tangent_res <= tol;
  r.antipodal = antipodal_res <= tol;
  r.perpendicular = perp_res <= tol;
  r.max_violation = std::max({tangent_res, antipodal_res, perp_res});
  return r;
}

/// Sample latitudes for reconstructing a smooth axisymmetric field with a
/// cubic spline: nodes equidistribute the spline-derivative error density
/// |theta''''|^(1/3), estimated by finite differences of the field's slope.
/// The density is capped outside |alpha| <= 0.93 a0 (it is non-integrable at
/// a divergent-slope boundary), which is enough to control the middle of the
/// band tightly. First and last nodes are exactly -a0 and a0.
inline Eigen::VectorXd graded_sample_latitudes(const AngleField& f, const AnnulusSpec& a,
                                               int n) {
  if (n < 4) throw InvalidArgument("graded sampling needs at least 4 nodes");
  if (!f.axisymmetric())
    throw InvalidArgument("graded sampling is defined for axisymmetric fields");
  const double a0 = a.alpha0;
  const double cap = 0.93 * a0;
  const int nf = 40001, ntail = 2001;
  const double h = 1e-3 * a0;
  auto slope = [&](double alpha) { return f.dtheta_dalpha_raw(alpha, kPi); };

  std::vector<double> grid_a, weight;
  grid_a.reserve(nf + 2 * (ntail - 1));
  weight.reserve(nf + 2 * (ntail - 1));
  // Interior weight |theta''''(alpha)|^(1/3) via a third difference of theta2.
  std::vector<double> wi(nf);
  for (int i = 0; i < nf; ++i) {
    const double al = -cap + 2.0 * cap * i / (nf - 1);
    const double d3 = (-slope(al - 1.5 * h) + 3.0 * slope(al - 0.5 * h) -
                       3.0 * slope(al + 0.5 * h) + slope(al + 1.5 * h)) /
                      (h * h * h);
    wi[i] = std::cbrt(std::abs(d3));
  }
  // Left tail (constant weight), interior, right tail.
  for (int i = 0; i < ntail - 1; ++i) {
    grid_a.push_back(-a0 + (a0 - cap) * i / (ntail - 1));
    weight.push_back(wi.front());
  }
  for (int i = 0; i < nf; ++i) {
    grid_a.push_back(-cap + 2.0 * cap * i / (nf - 1));
    weight.push_back(wi[i]);
  }
  for (int i = 1; i < ntail; ++i) {
    grid_a.push_back(cap + (a0 - cap) * i / (ntail - 1));
    weight.push_back(wi.back());
  }
  // Cumulative trapezoid of the weight, normalized to [0, 1].
  const std::size_t nn = grid_a.size();
  std::vector<double> cdf(nn, 0.0);
  for (std::size_t i = 1; i < nn; ++i)
    cdf[i] = cdf[i - 1] + 0.5 * (weight[i] + weight[i - 1]) * (grid_a[i] - grid_a[i - 1]);
  const double total = cdf.back();
  for (double& c : cdf) c /= total;

  Eigen::VectorXd out(n);
  std::size_t j = 0;
  for (int i = 0; i < n; ++i) {
    const double q = static_cast<double>(i) / (n - 1);
    while (j + 2 < nn && cdf[j + 1] < q) ++j;
    const double dc = cdf[j + 1] - cdf[j];
    const double t = dc > 0.0 ? (q - cdf[j]) / dc : 0.0;
    out[i] = grid_a[j] + t * (grid_a[j + 1] - grid_a[j]);
  }
  out[0] = -a0;
  out[n - 1] = a0;
  return out;
}

/// Samples an axisymmetric field onto a graded grid (see
/// graded_sample_latitudes) and returns the resulting grid field.
inline AngleField sample_to_grid(const AngleField& f, const AnnulusSpec& a, int n) {
  Eigen::VectorXd lat = graded_sample_latitudes(f, a, n);
  Eigen::VectorXd th(n);
  for (int i = 0; i < n; ++i) th[i] = f.theta_raw(lat[i], kPi);
  return AngleField::grid(a, std::move(lat), std::move(th));
}

}  // namespace sasaki
