#pragma once

// Integration over Delta and its boundary.
//
// Polynomials are integrated exactly (rational arithmetic, Dirichlet
// formula on each simplex). Everything else goes through an adaptive
// Grundmann-Moller pair (degrees 11 and 9) with global longest-edge
// bisection driven by the embedded error estimate.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "wkstab/affine.hpp"
#include "wkstab/error.hpp"
#include "wkstab/polynomial.hpp"
#include "wkstab/polytope.hpp"
#include "wkstab/weights.hpp"

namespace wkstab {

struct QuadratureOptions {
  double tol = 1e-12;        // relative
  double abs_floor = 1e-14;  // absolute
  int max_depth = 40;        // bisections of any single initial simplex
  std::size_t max_cells = 400000;
  bool force_numeric = false;  // skip the exact polynomial path
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t subdivisions = 0;
  std::optional<Rational> exact;  // set on exact paths
};

struct VectorQuadratureResult {
  Eigen::VectorXd value;
  double error_estimate = 0.0;  // max-norm over components
  std::size_t subdivisions = 0;
};

/// Thrown when refinement stops before meeting tolerance; carries the best
/// available value and its error estimate.
class QuadratureError : public Error {
 public:
  QuadratureError(std::string msg, QuadratureResult partial)
      : Error(ErrorKind::MaxDepthExceeded, std::move(msg)), partial_(std::move(partial)) {}
  const QuadratureResult& partial() const { return partial_; }

 private:
  QuadratureResult partial_;
};

// ---------------------------------------------------------------------------
// Exact polynomial integration

/// Pulls a polynomial back to the standard simplex coordinates of S.
inline AffineMap simplex_chart(const Simplex& s) {
  const std::size_t r = static_cast<std::size_t>(s.dim());
  AffineMap m;
  m.origin = s.vertices[0];
  m.linear.assign(r, RatVec(r));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k = 0; k < r; ++k) m.linear[i][k] = s.vertices[k + 1][i] - s.vertices[0][i];
  return m;
}

/// Integral of t^beta over the standard r-simplex: prod beta_i! / (r + |beta|)!.
inline Rational standard_simplex_moment(const Exponent& beta) {
  Rational num = 1;
  int total = 0;
  for (int b : beta) {
    num *= factorial(b);
    total += b;
  }
  return num / factorial(static_cast<int>(beta.size()) + total);
}

inline Rational integrate_poly_simplex(const Simplex& s, const Polynomial& f) {
  if (s.dim() == 0) return f.eval(s.vertices[0]);
  const Rational det = s.signed_det();
  if (det == 0) throw Error(ErrorKind::DegenerateSimplex, "simplex has zero volume");
  const Polynomial g = f.compose(simplex_chart(s));
  Rational sum = 0;
  for (const auto& [beta, c] : g.terms()) sum += c * standard_simplex_moment(beta);
  return sum * abs(det);
}

inline Rational integrate_monomial_simplex(const Simplex& s, const Exponent& alpha) {
  if (static_cast<int>(alpha.size()) != s.dim()) throw Error(ErrorKind::InvalidInput, "monomial dimension does not match simplex");
  return integrate_poly_simplex(s, Polynomial::monomial(alpha));
}

inline Rational integrate_poly(const DelzantPolytope& p, const Polynomial& f) {
  if (f.dim() != p.dim()) throw Error(ErrorKind::InvalidInput, "polynomial dimension does not match polytope");
  Rational sum = 0;
  for (const auto& s : triangulate(p)) sum += integrate_poly_simplex(s, f);
  return sum;
}

/// Exact integral over the boundary against the lattice measure d(sigma).
inline Rational integrate_boundary_poly(const DelzantPolytope& p, const Polynomial& f) {
  if (f.dim() != p.dim()) throw Error(ErrorKind::InvalidInput, "polynomial dimension does not match polytope");
  Rational sum = 0;
  for (const auto& facet : facets(p)) {
    const Polynomial g = f.compose(facet.embedding);
    sum += facet.polytope.dim() == 0 ? g.eval(RatVec{}) : integrate_poly(facet.polytope, g);
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Closed form for exp(<xi, x>) on a simplex

/// Divided differences switch from the all-positive series to the
/// recursive quotient once the node spread exceeds this.
inline constexpr double kExpSeriesSpread = 20.0;

namespace detail {

/// exp[t_0, ..., t_n] for sorted t with small spread, as the positive
/// series e^{t_0} sum_k h_k(t - t_0) / (k + n)!.
inline double exp_divdiff_series(const double* t, int n) {
  const double base = t[0];
  std::vector<double> y(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) y[static_cast<std::size_t>(i)] = t[i] - base;
  // h[j] holds h_k(y_0..y_j) for the current k.
  std::vector<double> h(y.size(), 1.0);
  double inv_fact = 1.0;  // 1 / (k + n)!
  for (int i = 2; i <= n; ++i) inv_fact /= i;
  double sum = inv_fact;
  for (int k = 1; k < 400; ++k) {
    double prev = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) {
      h[j] = prev + y[j] * h[j];
      prev = h[j];
    }
    inv_fact /= (k + n);
    const double term = h.back() * inv_fact;
    sum += term;
    if (term <= 1e-18 * sum && static_cast<double>(k) > y.back()) break;
  }
  return std::exp(base) * sum;
}

inline double exp_divdiff(const double* t, int n) {
  if (n == 0) return std::exp(t[0]);
  const double spread = t[n] - t[0];
  if (spread <= kExpSeriesSpread) return exp_divdiff_series(t, n);
  return (exp_divdiff(t + 1, n - 1) - exp_divdiff(t, n - 1)) / spread;
}

}  // namespace detail

/// exp[t_0, ..., t_n] (order-independent).
inline double exp_divided_difference(std::vector<double> t) {
  std::sort(t.begin(), t.end());
  return detail::exp_divdiff(t.data(), static_cast<int>(t.size()) - 1);
}

/// Integral of exp(<xi, x>) over S: r! vol(S) exp[<xi, v_0>, ..., <xi, v_r>].
inline double exp_affine_simplex_exact(const Simplex& s, const Vec& xi) {
  const int r = s.dim();
  if (xi.size() != r) throw Error(ErrorKind::InvalidInput, "xi dimension does not match simplex");
  const double vol = to_double(s.volume());
  if (vol == 0.0) throw Error(ErrorKind::DegenerateSimplex, "simplex has zero volume");
  std::vector<double> t;
  for (const auto& v : s.vertices) t.push_back(xi.dot(to_vec(v)));
  double fact = 1.0;
  for (int i = 2; i <= r; ++i) fact *= i;
  return fact * vol * exp_divided_difference(std::move(t));
}

// ---------------------------------------------------------------------------
// Adaptive cubature

/// Symmetric simplex rule in barycentric form, weights summing to 1.
/// Points come in levels sharing one weight; summing values per level
/// before weighting keeps the alternating-sign rule well conditioned.
struct SimplexRule {
  int dim = 0;
  int degree = 0;
  std::vector<std::vector<double>> barycentric;
  std::vector<double> weights;            // per point
  std::vector<std::size_t> level_end;     // one past the last point of each level
  std::vector<double> level_weight;

  double weight_sum() const {
    double s = 0.0;
    std::size_t begin = 0;
    for (std::size_t l = 0; l < level_end.size(); ++l) {
      s += level_weight[l] * static_cast<double>(level_end[l] - begin);
      begin = level_end[l];
    }
    return s;
  }
};

/// Grundmann-Moller rule of index s (degree 2s + 1) on the n-simplex.
inline SimplexRule grundmann_moller(int n, int s) {
  SimplexRule rule;
  rule.dim = n;
  rule.degree = 2 * s + 1;
  const int d = rule.degree;
  auto fact = [](int k) {
    long double f = 1.0L;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
  };
  std::vector<long double> raw;
  for (int i = 0; i <= s; ++i) {
    const double denom = d + n - 2 * i;
    const long double w =
        ((i % 2) ? -1.0L : 1.0L) * std::pow(static_cast<long double>(denom), d) / (fact(i) * fact(d + n - i)) * std::ldexp(1.0L, -2 * s) * fact(n);
    // Compositions of s - i into n + 1 parts.
    std::vector<int> beta(static_cast<std::size_t>(n) + 1, 0);
    std::function<void(int, int)> rec = [&](int j, int left) {
      if (j == n) {
        beta[static_cast<std::size_t>(n)] = left;
        std::vector<double> lam(beta.size());
        for (std::size_t k = 0; k < beta.size(); ++k) lam[k] = (2.0 * beta[k] + 1.0) / denom;
        rule.barycentric.push_back(std::move(lam));
        raw.push_back(w);
        return;
      }
      for (int b = 0; b <= left; ++b) {
        beta[static_cast<std::size_t>(j)] = b;
        rec(j + 1, left - b);
      }
    };
    rec(0, s - i);
    rule.level_end.push_back(raw.size());
  }
  // The closed-form weights sum to 1 up to rounding; renormalize so that
  // constants are integrated to the last bit.
  long double total = 0.0L;
  for (long double w : raw) total += w;
  for (long double w : raw) rule.weights.push_back(static_cast<double>(w / total));
  for (std::size_t e : rule.level_end) rule.level_weight.push_back(rule.weights[e - 1]);
  return rule;
}

/// The embedded pair (degree 11, degree 9) for each dimension up to kMaxDim.
struct EmbeddedRule {
  SimplexRule high, low;
};

inline const EmbeddedRule& embedded_rule(int n) {
  static const std::vector<EmbeddedRule> rules = [] {
    std::vector<EmbeddedRule> out(kMaxDim + 1);
    for (int k = 1; k <= kMaxDim; ++k) out[static_cast<std::size_t>(k)] = {grundmann_moller(k, 5), grundmann_moller(k, 4)};
    return out;
  }();
  if (n < 1 || n > kMaxDim) throw Error(ErrorKind::InvalidInput, "unsupported simplex dimension");
  return rules[static_cast<std::size_t>(n)];
}

/// Vector-valued integrand: writes `components` values for point x.
using VectorIntegrand = std::function<void(const Vec& x, double* out)>;

namespace detail {

struct Cell {
  std::vector<Vec> vertices;
  double volume = 0.0;
  int depth = 0;
  Eigen::VectorXd value;
  Eigen::VectorXd mass;  // rule estimate of the integral of |f|
  double error = 0.0;
};

inline double simplex_volume(const std::vector<Vec>& v) {
  const int r = static_cast<int>(v.size()) - 1;
  Mat m(r, r);
  for (int k = 0; k < r; ++k) m.col(k) = v[static_cast<std::size_t>(k) + 1] - v[0];
  double f = 1.0;
  for (int i = 2; i <= r; ++i) f *= i;
  return std::abs(m.determinant()) / f;
}

inline void evaluate_cell(Cell& c, int components, const VectorIntegrand& f) {
  const int r = static_cast<int>(c.vertices.size()) - 1;
  const EmbeddedRule& rule = embedded_rule(r);
  Eigen::VectorXd hi = Eigen::VectorXd::Zero(components), lo = Eigen::VectorXd::Zero(components);
  Eigen::VectorXd abs_hi = Eigen::VectorXd::Zero(components), abs_lo = Eigen::VectorXd::Zero(components);
  Eigen::VectorXd buf(components);
  Eigen::VectorXd level(components), abs_level(components);
  auto apply = [&](const SimplexRule& q, Eigen::VectorXd& acc, Eigen::VectorXd& abs_acc) {
    std::size_t p = 0;
    for (std::size_t l = 0; l < q.level_end.size(); ++l) {
      level.setZero();
      abs_level.setZero();
      for (; p < q.level_end[l]; ++p) {
        Vec x = Vec::Zero(r);
        for (int k = 0; k <= r; ++k) x += q.barycentric[p][static_cast<std::size_t>(k)] * c.vertices[static_cast<std::size_t>(k)];
        f(x, buf.data());
        level += buf;
        abs_level += buf.cwiseAbs();
      }
      acc += q.level_weight[l] * level;
      abs_acc += q.level_weight[l] * abs_level;
    }
  };
  apply(rule.high, hi, abs_hi);
  apply(rule.low, lo, abs_lo);
  c.value = c.volume * hi;
  c.mass = c.volume * abs_hi.cwiseAbs();
  c.error = c.volume * (hi - lo).cwiseAbs().maxCoeff();
  if (!std::isfinite(c.value.sum())) throw Error(ErrorKind::SingularOnDomain, "integrand is not finite on the domain");
}

inline std::pair<Cell, Cell> split(const Cell& c) {
  std::size_t ba = 0, bb = 1;
  double best = -1.0;
  for (std::size_t a = 0; a < c.vertices.size(); ++a)
    for (std::size_t b = a + 1; b < c.vertices.size(); ++b) {
      const double len = (c.vertices[a] - c.vertices[b]).squaredNorm();
      if (len > best) {
        best = len;
        ba = a;
        bb = b;
      }
    }
  const Vec mid = 0.5 * (c.vertices[ba] + c.vertices[bb]);
  Cell c1, c2;
  c1.vertices = c2.vertices = c.vertices;
  c1.vertices[ba] = mid;
  c2.vertices[bb] = mid;
  c1.volume = c2.volume = 0.5 * c.volume;
  c1.depth = c2.depth = c.depth + 1;
  return {std::move(c1), std::move(c2)};
}

}  // namespace detail

/// Adaptive integration of a vector-valued integrand over a set of
/// simplices. The stopping rule is max-norm:
///   sum of cell errors <= max(tol * scale, abs_floor),
/// where scale is the larger of max_c |int f_c| and max_c int |f_c|.
inline VectorQuadratureResult integrate_vector(const std::vector<std::vector<Vec>>& simplices, int components, const VectorIntegrand& f,
                                               const QuadratureOptions& opts = {}) {
  using detail::Cell;
  std::vector<Cell> cells;
  cells.reserve(simplices.size() * 4);
  for (const auto& s : simplices) {
    Cell c;
    c.vertices = s;
    c.volume = detail::simplex_volume(s);
    detail::evaluate_cell(c, components, f);
    cells.push_back(std::move(c));
  }
  auto cmp = [&](std::size_t a, std::size_t b) {
    if (cells[a].error != cells[b].error) return cells[a].error < cells[b].error;
    return a > b;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> heap(cmp);
  for (std::size_t i = 0; i < cells.size(); ++i) heap.push(i);

  // Tolerances are relative to max(|int f|, int |f|) so that integrals
  // which cancel to zero still terminate.
  double scale = 0.0;
  auto totals = [&](Eigen::VectorXd& value, double& error) {
    value = Eigen::VectorXd::Zero(components);
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(components);
    error = 0.0;
    for (const auto& c : cells) {
      value += c.value;
      mass += c.mass;
      error += c.error;
    }
    scale = std::max(value.cwiseAbs().maxCoeff(), mass.maxCoeff());
  };
  double running_error = 0.0;
  for (const auto& c : cells) running_error += c.error;
  {
    Eigen::VectorXd v;
    double e;
    totals(v, e);
  }
  std::size_t subdivisions = 0;
  VectorQuadratureResult out;
  while (true) {
    if (running_error <= std::max(opts.tol * scale, opts.abs_floor)) {
      totals(out.value, out.error_estimate);
      running_error = out.error_estimate;
      if (running_error <= std::max(opts.tol * scale, opts.abs_floor)) break;
    }
    // Discard cells that may not be refined further.
    while (!heap.empty() && cells[heap.top()].depth >= opts.max_depth) heap.pop();
    if (heap.empty() || cells.size() >= opts.max_cells) {
      totals(out.value, out.error_estimate);
      out.subdivisions = subdivisions;
      QuadratureResult partial{out.value.size() ? out.value[0] : 0.0, out.error_estimate, subdivisions, std::nullopt};
      throw QuadratureError(heap.empty() ? "maximum bisection depth reached before tolerance" : "cell budget exhausted before tolerance",
                            partial);
    }
    const std::size_t i = heap.top();
    heap.pop();
    auto [c1, c2] = detail::split(cells[i]);
    detail::evaluate_cell(c1, components, f);
    detail::evaluate_cell(c2, components, f);
    running_error += c1.error + c2.error - cells[i].error;
    cells[i] = std::move(c1);
    cells.push_back(std::move(c2));
    heap.push(i);
    heap.push(cells.size() - 1);
    ++subdivisions;
    if (subdivisions % 256 == 0) {
      totals(out.value, running_error);
    }
  }
  out.subdivisions = subdivisions;
  return out;
}

inline std::vector<std::vector<Vec>> numeric_simplices(const DelzantPolytope& p) {
  std::vector<std::vector<Vec>> out;
  for (const auto& s : triangulate(p)) {
    std::vector<Vec> v;
    for (const auto& x : s.vertices) v.push_back(to_vec(x));
    out.push_back(std::move(v));
  }
  return out;
}

inline VectorQuadratureResult integrate_vector(const DelzantPolytope& p, int components, const VectorIntegrand& f,
                                               const QuadratureOptions& opts = {}) {
  return integrate_vector(numeric_simplices(p), components, f, opts);
}

inline QuadratureResult integrate_scalar(const DelzantPolytope& p, const std::function<double(const Vec&)>& f, const QuadratureOptions& opts = {}) {
  auto r = integrate_vector(p, 1, [&](const Vec& x, double* out) { *out = f(x); }, opts);
  return {r.value[0], r.error_estimate, r.subdivisions, std::nullopt};
}

namespace detail {

inline QuadratureResult integrate_weighted_checked(const DelzantPolytope& p, const WeightFn& f, const QuadratureOptions& opts) {
  if (p.dim() == 0) {
    // A point: the integral is point evaluation.
    if (f.is_polynomial() && !opts.force_numeric) {
      Rational v = f.as_polynomial().eval(RatVec{});
      return {to_double(v), 0.0, 0, v};
    }
    return {f.eval(Vec(0)), 0.0, 0, std::nullopt};
  }
  if (f.is_polynomial() && !opts.force_numeric) {
    Rational v = integrate_poly(p, f.as_polynomial());
    return {to_double(v), 0.0, 0, v};
  }
  return integrate_scalar(p, [&](const Vec& x) { return f.eval(x); }, opts);
}

}  // namespace detail

/// Integral of f over Delta. Polynomial integrands take the exact path.
inline QuadratureResult integrate_weighted(const DelzantPolytope& p, const WeightFn& f, const QuadratureOptions& opts = {}) {
  if (f.dim() != p.dim()) throw Error(ErrorKind::InvalidInput, "weight dimension does not match polytope");
  f.require_finite_on(p);
  return detail::integrate_weighted_checked(p, f, opts);
}

inline QuadratureResult integrate_weighted(const DelzantPolytope& p, const WeightFn& f, const Polynomial& g, const QuadratureOptions& opts = {}) {
  return integrate_weighted(p, f * g, opts);
}

/// Integral of f over the boundary against d(sigma), facet by facet in
/// lattice coordinates.
inline QuadratureResult integrate_boundary(const DelzantPolytope& p, const WeightFn& f, const QuadratureOptions& opts = {}) {
  if (f.dim() != p.dim()) throw Error(ErrorKind::InvalidInput, "weight dimension does not match polytope");
  f.require_finite_on(p);
  QuadratureResult total;
  bool exact = true;
  Rational exact_sum = 0;
  for (const auto& facet : facets(p)) {
    const WeightFn g = f.pullback(facet.embedding);
    QuadratureResult r = detail::integrate_weighted_checked(facet.polytope, g, opts);
    total.value += r.value;
    total.error_estimate += r.error_estimate;
    total.subdivisions += r.subdivisions;
    if (r.exact)
      exact_sum += *r.exact;
    else
      exact = false;
  }
  if (exact) {
    total.exact = exact_sum;
    total.value = to_double(exact_sum);
  }
  return total;
}

inline QuadratureResult integrate_boundary(const DelzantPolytope& p, const WeightFn& f, const Polynomial& g, const QuadratureOptions& opts = {}) {
  return integrate_boundary(p, f * g, opts);
}

}  // namespace wkstab
