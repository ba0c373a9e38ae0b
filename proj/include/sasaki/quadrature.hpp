#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "sasaki/errors.hpp"
#include "sasaki/sphere_domain.hpp"

namespace sasaki {

/// Sums a vector in a fixed pairwise (recursive halving) order, so the result
/// is bit-identical regardless of how the terms were produced.
inline double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v.data(), v.size());
}

inline double pairwise_sum(const Eigen::VectorXd& v) {
  return pairwise_sum(v.data(), static_cast<std::size_t>(v.size()));
}

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence. Accurate to machine precision for the orders
/// used here (<= 64).
inline void gauss_legendre_nodes(int order, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  if (order < 2) throw InvalidArgument("Gauss-Legendre order must be >= 2");
  nodes.resize(order);
  weights.resize(order);
  const int m = (order + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Tricomi initial guess for the i-th positive root.
    double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        // One clean-up iteration after convergence, then stop.
        if (iter > 0) break;
      }
    }
    nodes[i] = -x;
    nodes[order - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) nodes[order / 2] = 0.0;
}

/// Composite Gauss-Legendre rule: fixed order and panel count.
struct GaussLegendreRule {
  int order = 16;
  int panels = 64;
};

/// Globally adaptive Simpson rule with an absolute tolerance and a hard
/// evaluation budget.
struct AdaptiveSimpsonRule {
  double tol = 1e-10;
  std::int64_t max_evals = 2'000'000;
};

/// Quadrature configuration: the rule plus whether inverse-square-root
/// endpoint singularities should be regularized by the latitude substitution
/// sin(alpha) = sin(alpha0) sin(u).
struct QuadratureScheme {
  std::variant<GaussLegendreRule, AdaptiveSimpsonRule> rule = GaussLegendreRule{};
  bool endpoint_substitution = true;
};

inline QuadratureScheme default_scheme() {
  return QuadratureScheme{GaussLegendreRule{16, 64}, true};
}

/// The independent cross-check scheme.
inline QuadratureScheme simpson_oracle_scheme() {
  return QuadratureScheme{AdaptiveSimpsonRule{1e-10, 2'000'000}, true};
}

inline void validate(const QuadratureScheme& q) {
  if (const auto* gl = std::get_if<GaussLegendreRule>(&q.rule)) {
    if (gl->order < 2) throw InvalidArgument("quadrature order must be >= 2");
    if (gl->panels < 1) throw InvalidArgument("quadrature panels must be >= 1");
  } else {
    const auto& as = std::get<AdaptiveSimpsonRule>(q.rule);
    if (!(as.tol > 0)) throw InvalidArgument("quadrature tolerance must be positive");
    if (as.max_evals < 9) throw InvalidArgument("quadrature budget too small");
  }
}

/// Short human-readable tag used in reports.
inline std::string describe(const QuadratureScheme& q) {
  std::string s;
  if (const auto* gl = std::get_if<GaussLegendreRule>(&q.rule)) {
    s = "gauss-legendre(order=" + std::to_string(gl->order) +
        ",panels=" + std::to_string(gl->panels) + ")";
  } else {
    const auto& as = std::get<AdaptiveSimpsonRule>(q.rule);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "adaptive-simpson(tol=%g)", as.tol);
    s = buf;
  }
  s += q.endpoint_substitution ? "+substitution" : "-substitution";
  return s;
}

/// Integrates f over [a, b] with the composite Gauss-Legendre rule.
/// All node contributions are reduced in a fixed pairwise order.
inline double integrate(const GaussLegendreRule& rule, const std::function<double(double)>& f,
                        double a, double b) {
  Eigen::VectorXd x, w;
  gauss_legendre_nodes(rule.order, x, w);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(rule.order) * rule.panels);
  const double h = (b - a) / rule.panels;
  for (int p = 0; p < rule.panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    const double half = 0.5 * h;
    for (int i = 0; i < rule.order; ++i)
      terms.push_back(half * w[i] * f(mid + half * x[i]));
  }
  return pairwise_sum(terms);
}

namespace detail {

struct SimpsonWorkspace {
  const std::function<double(double)>& f;
  std::int64_t evals = 0;
  std::int64_t budget = 0;

  double eval(double x) {
    if (++evals > budget)
      throw QuadratureFailure("adaptive Simpson exceeded its evaluation budget");
    return f(x);
  }
};

inline double simpson_recurse(SimpsonWorkspace& ws, double a, double b, double fa, double fm,
                              double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = ws.eval(lm), frm = ws.eval(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) throw QuadratureFailure("adaptive Simpson exceeded its recursion depth");
  if (std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_recurse(ws, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(ws, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Integrates f over [a, b] with globally adaptive Simpson refinement.
/// Throws QuadratureFailure if the evaluation budget or recursion depth is
/// exhausted before the tolerance is met.
inline double integrate(const AdaptiveSimpsonRule& rule, const std::function<double(double)>& f,
                        double a, double b) {
  detail::SimpsonWorkspace ws{f, 0, rule.max_evals};
  const double m = 0.5 * (a + b);
  const double fa = ws.eval(a), fm = ws.eval(m), fb = ws.eval(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_recurse(ws, a, b, fa, fm, fb, whole, rule.tol, 48);
}

/// Rule dispatch over the scheme variant. The endpoint_substitution flag is
/// interpreted by the caller (it changes the integrand, not the rule).
inline double integrate(const QuadratureScheme& q, const std::function<double(double)>& f,
                        double a, double b) {
  validate(q);
  return std::visit([&](const auto& rule) { return integrate(rule, f, a, b); }, q.rule);
}

}  // namespace sasaki
