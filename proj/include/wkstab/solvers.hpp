#pragma once

// Newton solvers for the two convex functionals on t:
//
//   F(xi) = int_Delta exp(<xi, x>) p(x) dx          (soliton field)
//   V(xi) = int_Delta (<xi, x> + 1)^{-s} p(x) dx    (Reeb field, MSY volume)
//
// Gradients and Hessians are moment integrals evaluated in one adaptive
// pass. Both start at xi = 0.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "wkstab/affine.hpp"
#include "wkstab/error.hpp"
#include "wkstab/polytope.hpp"
#include "wkstab/quadrature.hpp"
#include "wkstab/weights.hpp"

namespace wkstab {

struct SolverOptions {
  double tol = 1e-10;  // on |grad| / objective
  int max_iter = 100;
  double armijo_c = 1e-4;
  double tau = 0.95;                 // fraction to the boundary (Reeb solver)
  std::optional<double> quad_tol;    // defaults to tol * 1e-2
  std::optional<Vec> initial;        // defaults to 0
};

struct TraceEntry {
  Vec xi;
  double objective = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;  // step length taken from this iterate (0 at the last)
  double hessian_min_eigenvalue = 0.0;
  double min_vertex_value = 1.0;  // min over vertices of <xi, v> + 1
};

struct SolverResult {
  std::string functional;  // "tian_zhu" or "msy"
  Vec xi0;
  double objective = 0.0;
  Vec gradient;
  double grad_norm = 0.0;
  double hessian_min_eigenvalue = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<TraceEntry> trace;
};

namespace detail {

struct Moments {
  double value = 0.0;
  Vec grad;
  Mat hess;
  double error = 0.0;
};

/// Integrates phi0 p, phi1 x p, phi2 x x^T p in one pass, where
/// (phi0, phi1, phi2) are produced by `kernel` at each point.
template <class Kernel>
Moments moments(const std::vector<std::vector<Vec>>& simplices, int r, const WeightFn& p, Kernel kernel, const QuadratureOptions& q) {
  const int n = 1 + r + r * (r + 1) / 2;
  auto res = integrate_vector(
      simplices, n,
      [&](const Vec& x, double* out) {
        double k0, k1, k2;
        kernel(x, k0, k1, k2);
        const double pw = p.eval(x);
        out[0] = k0 * pw;
        int c = 1;
        for (int i = 0; i < r; ++i) out[c++] = k1 * pw * x[i];
        for (int i = 0; i < r; ++i)
          for (int j = i; j < r; ++j) out[c++] = k2 * pw * x[i] * x[j];
      },
      q);
  Moments m;
  m.value = res.value[0];
  m.grad = res.value.segment(1, r);
  m.hess = Mat(r, r);
  int c = 1 + r;
  for (int i = 0; i < r; ++i)
    for (int j = i; j < r; ++j) m.hess(i, j) = m.hess(j, i) = res.value[c++];
  m.error = res.error_estimate;
  return m;
}

inline void check_common(const DelzantPolytope& p, const WeightFn& w) {
  if (w.dim() != p.dim()) throw Error(ErrorKind::InvalidInput, "weight dimension does not match polytope");
  if (!p.contains_in_interior(RatVec(static_cast<std::size_t>(p.dim()), Rational(0))))
    throw Error(ErrorKind::OriginNotInterior, "the origin must lie in the interior of the polytope");
  w.require_finite_on(p);
  require_positive(w, p, "p");
}

inline double min_eigenvalue(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(h);
  return eig.eigenvalues().minCoeff();
}

/// Shared damped-Newton loop. `eval_full` returns value/gradient/Hessian
/// at xi; `eval_value` returns the objective and its error; `max_step`
/// bounds the step along d (feasibility).
template <class Full, class Value, class MaxStep, class Margin>
SolverResult newton(std::string name, int r, const SolverOptions& opts, Full eval_full, Value eval_value, MaxStep max_step, Margin margin) {
  SolverResult res;
  res.functional = std::move(name);
  Vec xi = opts.initial ? *opts.initial : Vec::Zero(r);
  for (int it = 0;; ++it) {
    Moments m = eval_full(xi);
    TraceEntry t;
    t.xi = xi;
    t.objective = m.value;
    t.grad_norm = m.grad.norm();
    t.hessian_min_eigenvalue = min_eigenvalue(m.hess);
    t.min_vertex_value = margin(xi);
    res.trace.push_back(t);
    res.xi0 = xi;
    res.objective = m.value;
    res.gradient = m.grad;
    res.grad_norm = t.grad_norm;
    res.hessian_min_eigenvalue = t.hessian_min_eigenvalue;
    res.iterations = it;
    if (!(t.hessian_min_eigenvalue > 0))
      throw Error(ErrorKind::NotPositiveDefinite, res.functional + ": Hessian lost positive definiteness at iteration " + std::to_string(it));
    if (t.grad_norm <= opts.tol * std::abs(m.value)) {
      res.converged = true;
      return res;
    }
    if (it >= opts.max_iter)
      throw Error(ErrorKind::MaxIterations, res.functional + ": no convergence after " + std::to_string(opts.max_iter) + " iterations (|grad| = " +
                                                WeightFn::fmt_double(t.grad_norm) + ")");
    const Vec d = m.hess.ldlt().solve(-m.grad);
    const double slope = m.grad.dot(d);
    double step = std::min(1.0, max_step(xi, d));
    bool accepted = false;
    for (int k = 0; k < 60; ++k, step *= 0.5) {
      const auto [f, err] = eval_value(xi + step * d);
      const double noise = 2 * (err + m.error) + 4 * std::numeric_limits<double>::epsilon() * std::abs(m.value);
      if (f <= m.value + opts.armijo_c * step * slope + noise) {
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw Error(ErrorKind::MaxIterations, res.functional + ": line search failed at iteration " + std::to_string(it) + " (|grad| = " +
                                                WeightFn::fmt_double(t.grad_norm) + ")");
    res.trace.back().step = step;
    xi = xi + step * d;
  }
}

inline QuadratureOptions solver_quadrature(const SolverOptions& o) {
  QuadratureOptions q;
  q.tol = o.quad_tol ? *o.quad_tol : o.tol * 1e-2;
  q.force_numeric = true;
  return q;
}

}  // namespace detail

/// Minimizes F(xi) = int exp(<xi, x>) p dx.
inline SolverResult tian_zhu_soliton(const DelzantPolytope& p, const WeightFn& w, const SolverOptions& opts = {}) {
  detail::check_common(p, w);
  const int r = p.dim();
  const auto simplices = numeric_simplices(p);
  const QuadratureOptions q = detail::solver_quadrature(opts);
  auto full = [&](const Vec& xi) {
    return detail::moments(
        simplices, r, w,
        [&](const Vec& x, double& k0, double& k1, double& k2) { k0 = k1 = k2 = std::exp(xi.dot(x)); }, q);
  };
  auto value = [&](const Vec& xi) {
    auto v = integrate_vector(simplices, 1, [&](const Vec& x, double* out) { *out = std::exp(xi.dot(x)) * w.eval(x); }, q);
    return std::pair<double, double>{v.value[0], v.error_estimate};
  };
  auto unbounded = [](const Vec&, const Vec&) { return 1.0; };
  auto margin = [](const Vec&) { return 1.0; };
  return detail::newton("tian_zhu", r, opts, full, value, unbounded, margin);
}

/// Minimum over vertices of <xi, v> + 1.
inline double reeb_margin(const DelzantPolytope& p, const Vec& xi) {
  double m = INFINITY;
  for (const auto& v : p.vertices()) m = std::min(m, xi.dot(to_vec(v)) + 1.0);
  return m;
}

/// Minimizes V(xi) = int (<xi, x> + 1)^{-s} p dx over the feasible cone.
inline SolverResult msy_reeb(const DelzantPolytope& p, const WeightFn& w, double s, const SolverOptions& opts = {}) {
  detail::check_common(p, w);
  if (!(s > 0)) throw Error(ErrorKind::InvalidInput, "exponent s must be positive");
  const int r = p.dim();
  if (opts.initial && !(reeb_margin(p, *opts.initial) > 0))
    throw Error(ErrorKind::InfeasibleStart, "initial xi makes <xi, x> + 1 non-positive at a vertex");
  const auto simplices = numeric_simplices(p);
  std::vector<Vec> verts;
  for (const auto& v : p.vertices()) verts.push_back(to_vec(v));
  const QuadratureOptions q = detail::solver_quadrature(opts);
  auto full = [&](const Vec& xi) {
    return detail::moments(
        simplices, r, w,
        [&](const Vec& x, double& k0, double& k1, double& k2) {
          const double l = xi.dot(x) + 1.0;
          if (!(l > 0)) throw Error(ErrorKind::DomainViolation, "Reeb affine function is not positive on the polytope");
          k0 = std::pow(l, -s);
          k1 = -s * k0 / l;
          k2 = s * (s + 1) * k0 / (l * l);
        },
        q);
  };
  auto value = [&](const Vec& xi) {
    if (!(reeb_margin(p, xi) > 0)) return std::pair<double, double>{INFINITY, 0.0};
    auto v = integrate_vector(simplices, 1, [&](const Vec& x, double* out) { *out = std::pow(xi.dot(x) + 1.0, -s) * w.eval(x); }, q);
    return std::pair<double, double>{v.value[0], v.error_estimate};
  };
  auto max_step = [&](const Vec& xi, const Vec& d) {
    const double m = reeb_margin(p, xi);
    double t = 1.0;
    for (const auto& v : verts) {
      const double rate = d.dot(v);
      if (rate < 0) t = std::min(t, (xi.dot(v) + 1.0 - (1.0 - opts.tau) * m) / -rate);
    }
    return t;
  };
  auto margin = [&](const Vec& xi) { return reeb_margin(p, xi); };
  return detail::newton("msy", r, opts, full, value, max_step, margin);
}

}  // namespace wkstab
