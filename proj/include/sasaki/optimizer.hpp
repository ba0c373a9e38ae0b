#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "sasaki/closed_forms.hpp"
#include "sasaki/errors.hpp"
#include "sasaki/fields.hpp"
#include "sasaki/quadrature.hpp"
#include "sasaki/sphere_domain.hpp"

namespace sasaki {

/// Discretized axisymmetric angle profile with pinned boundary values
/// theta(-alpha0) = 0 and theta(alpha0) = pi.
struct Profile {
  double alpha0 = 0.0;
  Eigen::VectorXd nodes;   // strictly increasing, nodes[0] = -alpha0, nodes[n-1] = alpha0
  Eigen::VectorXd thetas;  // thetas[0] = 0, thetas[n-1] = pi, pinned exactly
};

inline Profile make_profile(const AnnulusSpec& a, Eigen::VectorXd nodes, Eigen::VectorXd thetas) {
  const Eigen::Index n = nodes.size();
  if (n < 2 || thetas.size() != n)
    throw InvalidArgument("profile needs >= 2 matching nodes/thetas");
  if (nodes[0] != -a.alpha0 || nodes[n - 1] != a.alpha0)
    throw InvalidArgument("profile nodes must start at -alpha0 and end at alpha0");
  for (Eigen::Index i = 1; i < n; ++i)
    if (!(nodes[i] > nodes[i - 1]))
      throw InvalidArgument("profile nodes must be strictly increasing");
  if (thetas[0] != 0.0 || thetas[n - 1] != kPi)
    throw InvalidArgument("profile endpoint angles must be exactly 0 and pi");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!std::isfinite(thetas[i])) throw InvalidArgument("profile angles must be finite");
  return Profile{a.alpha0, std::move(nodes), std::move(thetas)};
}

/// Node latitudes uniform in the substituted variable u (sin a = sin a0 sin u),
/// concentrating nodes near +-alpha0 where the sharp profile's slope diverges.
inline Eigen::VectorXd u_mesh_latitudes(const AnnulusSpec& a, int n) {
  if (n < 2) throw InvalidArgument("mesh needs at least 2 nodes");
  const double s0 = std::sin(a.alpha0);
  Eigen::VectorXd lat(n);
  for (int i = 0; i < n; ++i) {
    const double u = -kPi / 2.0 + kPi * i / (n - 1.0);
    lat[i] = std::asin(s0 * std::sin(u));
  }
  lat[0] = -a.alpha0;
  lat[n - 1] = a.alpha0;
  return lat;
}

/// Linear initial profile between the pinned endpoints.
inline Profile linear_profile(const AnnulusSpec& a, int n) {
  Eigen::VectorXd nodes = u_mesh_latitudes(a, n);
  Eigen::VectorXd th(n);
  for (int i = 0; i < n; ++i) th[i] = kPi * (nodes[i] + a.alpha0) / (2.0 * a.alpha0);
  th[0] = 0.0;
  th[n - 1] = kPi;
  return make_profile(a, std::move(nodes), std::move(th));
}

/// The closed-form sharp profile sampled on the mesh.
inline Profile sampled_minimizer_profile(const AnnulusSpec& a, int n) {
  Eigen::VectorXd nodes = u_mesh_latitudes(a, n);
  Eigen::VectorXd th(n);
  for (int i = 1; i < n - 1; ++i) th[i] = minimizer_angle(nodes[i], a);
  th[0] = 0.0;
  th[n - 1] = kPi;
  return make_profile(a, std::move(nodes), std::move(th));
}

/// Midpoint-rule discretization of the reduced area:
/// sum over segments of 2 pi * dalpha_i * sqrt(1 + cos^2(mid_i) slope_i^2).
inline double discrete_area(const Profile& p) {
  const Eigen::Index n = p.nodes.size();
  std::vector<double> terms(static_cast<std::size_t>(n - 1));
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double da = p.nodes[i + 1] - p.nodes[i];
    const double c = std::cos(0.5 * (p.nodes[i] + p.nodes[i + 1]));
    const double s = (p.thetas[i + 1] - p.thetas[i]) / da;
    terms[static_cast<std::size_t>(i)] = kTwoPi * da * std::sqrt(1.0 + c * c * s * s);
  }
  return pairwise_sum(terms);
}

/// Exact partial derivatives of discrete_area with respect to the interior
/// angles (endpoints are pinned): component j is w_j - w_{j+1} with
/// w_i = 2 pi cos^2(mid_i) slope_i / sqrt(1 + cos^2(mid_i) slope_i^2).
inline Eigen::VectorXd area_gradient(const Profile& p) {
  const Eigen::Index n = p.nodes.size();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double da = p.nodes[i + 1] - p.nodes[i];
    const double c = std::cos(0.5 * (p.nodes[i] + p.nodes[i + 1]));
    const double s = (p.thetas[i + 1] - p.thetas[i]) / da;
    const double c2 = c * c;
    const double w = kTwoPi * c2 * s / std::sqrt(1.0 + c2 * s * s);
    g[i + 1] += w;
    g[i] -= w;
  }
  return g.segment(1, n - 2);
}

/// The conserved quantity cos^2(a) theta2 / sqrt(1 + cos^2(a) theta2^2)
/// evaluated on each segment midpoint.
inline Eigen::VectorXd first_integral_values(const Profile& p) {
  const Eigen::Index n = p.nodes.size();
  Eigen::VectorXd v(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double da = p.nodes[i + 1] - p.nodes[i];
    const double c = std::cos(0.5 * (p.nodes[i] + p.nodes[i + 1]));
    const double s = (p.thetas[i + 1] - p.thetas[i]) / da;
    const double c2 = c * c;
    v[i] = c2 * s / std::sqrt(1.0 + c2 * s * s);
  }
  return v;
}

/// Max absolute deviation of the conserved quantity from its segment-median
/// value; near zero exactly when the profile satisfies the discrete
/// Euler-Lagrange conservation law.
inline double first_integral_residual(const Profile& p) {
  Eigen::VectorXd v = first_integral_values(p);
  std::vector<double> sorted(v.data(), v.data() + v.size());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  const double median =
      (m % 2 == 1) ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  return (v.array() - median).abs().maxCoeff();
}

/// Exact reduced area of the piecewise-linear field the profile defines:
/// per-segment Gauss-Legendre (order 8) on the smooth integrand
/// 2 pi sqrt(1 + cos^2(a) slope^2). Distinguishes the profile's true area
/// from the midpoint-rule objective value.
inline double piecewise_linear_area(const Profile& p) {
  static thread_local Eigen::VectorXd x, w;
  if (x.size() == 0) gauss_legendre_nodes(8, x, w);
  const Eigen::Index n = p.nodes.size();
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(8 * (n - 1)));
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double da = p.nodes[i + 1] - p.nodes[i];
    const double mid = 0.5 * (p.nodes[i] + p.nodes[i + 1]);
    const double s = (p.thetas[i + 1] - p.thetas[i]) / da;
    for (int j = 0; j < 8; ++j) {
      const double c = std::cos(mid + 0.5 * da * x[j]);
      terms.push_back(kTwoPi * 0.5 * da * w[j] * std::sqrt(1.0 + c * c * s * s));
    }
  }
  return pairwise_sum(terms);
}

enum class StepRule { BacktrackingArmijo, FixedStep };

struct OptimizeOptions {
  long max_iters = 0;  // 0: auto, min(600000, 20 n^2)
  double grad_tol = 1e-8;
  StepRule step_rule = StepRule::BacktrackingArmijo;
  double fixed_step = 1e-3;  // used by StepRule::FixedStep only
  std::function<void(long, double)> on_iterate;  // (iteration, objective) after each step
};

struct OptimizerResult {
  Profile profile;
  double final_area = 0.0;    // midpoint-rule objective at the final profile
  double profile_area = 0.0;  // exact area of the final piecewise-linear field
  long iterations = 0;
  double gradient_norm = 0.0;
  bool converged = false;
  double max_deviation_from_closed_form = 0.0;
};

/// Gradient descent with backtracking line search (halving, Armijo constant
/// 1e-4, warm-started step) from the linear initial profile. Stops at
/// gradient_norm <= grad_tol or the iteration cap; a result is returned
/// either way, with converged reporting which.
inline OptimizerResult minimize_profile(const AnnulusSpec& a, int n,
                                        const OptimizeOptions& opts = {}) {
  if (n < 8) throw InvalidArgument("minimize_profile needs n >= 8 nodes");
  const long max_iters =
      opts.max_iters > 0 ? opts.max_iters : std::min<long>(600000, 20L * n * n);
  Profile p = linear_profile(a, n);
  double f = discrete_area(p);
  Eigen::VectorXd g = area_gradient(p);
  double step = 1.0;
  long iters = 0;
  constexpr double kArmijo = 1e-4;
  while (iters < max_iters && g.norm() > opts.grad_tol) {
    if (opts.step_rule == StepRule::FixedStep) {
      p.thetas.segment(1, n - 2) -= opts.fixed_step * g;
      f = discrete_area(p);
    } else {
      const double gnorm2 = g.squaredNorm();
      Profile trial = p;
      double accepted = 0.0;
      for (int h = 0; h < 64; ++h) {
        trial.thetas.segment(1, n - 2) = p.thetas.segment(1, n - 2) - step * g;
        const double ft = discrete_area(trial);
        if (ft <= f - kArmijo * step * gnorm2) {
          p.thetas = trial.thetas;
          f = ft;
          accepted = step;
          break;
        }
        step *= 0.5;
      }
      if (accepted == 0.0) break;  // line search stalled at machine precision
      step = 2.0 * accepted;
    }
    g = area_gradient(p);
    ++iters;
    if (opts.on_iterate) opts.on_iterate(iters, f);
  }
  OptimizerResult r;
  r.final_area = f;
  r.profile_area = piecewise_linear_area(p);
  r.iterations = iters;
  r.gradient_norm = g.norm();
  r.converged = r.gradient_norm <= opts.grad_tol;
  double dev = 0.0;
  for (int i = 1; i < n - 1; ++i)
    dev = std::max(dev, std::abs(p.thetas[i] - minimizer_angle(p.nodes[i], a)));
  r.max_deviation_from_closed_form = dev;
  r.profile = std::move(p);
  return r;
}

/// The profile as a sampled grid field (the export format consumed by the
/// fields module).
inline AngleField profile_to_grid_field(const Profile& p) {
  return AngleField::grid(AnnulusSpec{p.alpha0}, p.nodes, p.thetas);
}

}  // namespace sasaki
