#pragma once

// Weighted Futaki invariants and the extremal affine function.
//
// Polytope form of the invariant: for weights (v, w) and an affine test
// function l,
//
//     Fut_{v,w}(l) = 2 int_{boundary} v l d(sigma) - int_Delta w l dx.
//
// On a canonical Fano polytope with the soliton weight w = 2(m v + x.grad v)
// integration by parts collapses this to 2 int <zeta, x> v dx.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "wkstab/affine.hpp"
#include "wkstab/error.hpp"
#include "wkstab/polytope.hpp"
#include "wkstab/quadrature.hpp"
#include "wkstab/weights.hpp"

namespace wkstab {

enum class Normalization { Polytope, Symplectic };
enum class FutakiMethod { FanoClosedForm, BoundaryFormula, MetricNumeric };

inline const char* to_string(Normalization n) { return n == Normalization::Polytope ? "polytope" : "symplectic"; }

inline Normalization parse_normalization(const std::string& s) {
  if (s == "polytope") return Normalization::Polytope;
  if (s == "symplectic") return Normalization::Symplectic;
  throw Error(ErrorKind::Parse, "normalization must be 'polytope' or 'symplectic', got '" + s + "'");
}

inline const char* to_string(FutakiMethod m) {
  switch (m) {
    case FutakiMethod::FanoClosedForm: return "fano_closed_form";
    case FutakiMethod::BoundaryFormula: return "boundary_formula";
    case FutakiMethod::MetricNumeric: return "metric_numeric";
  }
  return "?";
}

/// (2 pi)^m for the symplectic normalization, 1 otherwise.
inline double normalization_factor(Normalization n, int m) { return n == Normalization::Polytope ? 1.0 : std::pow(2 * std::numbers::pi, m); }

struct FutakiReport {
  AffineFunction direction;
  double value = 0.0;
  double error_estimate = 0.0;
  FutakiMethod method = FutakiMethod::BoundaryFormula;
  Normalization normalization = Normalization::Polytope;
  std::optional<Rational> exact;  // polytope-normalized exact value, when available
};

/// The affine basis 1, x_1, ..., x_r.
inline std::vector<AffineFunction> affine_basis(int r) {
  std::vector<AffineFunction> b{AffineFunction::constant(r, 1)};
  for (int i = 0; i < r; ++i) b.push_back(AffineFunction::coordinate(r, i));
  return b;
}

/// Closed form valid for the soliton pair (v, 2(m v + x.grad v)) on a
/// canonical Fano polytope: Fut(l_zeta) = 2 kappa int <zeta, x> v dx.
inline FutakiReport futaki_fano(const DelzantPolytope& p, const WeightFn& v, const RatVec& zeta, Normalization norm = Normalization::Polytope,
                                const QuadratureOptions& opts = {}) {
  if (!p.is_canonical_fano()) throw Error(ErrorKind::NotCanonicalFano, "closed-form Futaki needs a canonical Fano polytope (all offsets 1)");
  if (static_cast<int>(zeta.size()) != p.dim()) throw Error(ErrorKind::InvalidInput, "direction has the wrong dimension");
  require_positive(v, p, "v");
  const AffineFunction lin(zeta, 0);
  const QuadratureResult q = integrate_weighted(p, v * Polynomial::from_affine(lin), opts);
  const double kappa = normalization_factor(norm, p.dim());
  FutakiReport rep;
  rep.direction = lin;
  rep.value = 2 * kappa * q.value;
  rep.error_estimate = 2 * kappa * q.error_estimate;
  rep.method = FutakiMethod::FanoClosedForm;
  rep.normalization = norm;
  if (q.exact) rep.exact = 2 * *q.exact;
  return rep;
}

/// Fut_{v,w}(l) = 2 int_{boundary} v l d(sigma) - int w l dx.
inline FutakiReport futaki_boundary(const DelzantPolytope& p, const WeightFn& v, const WeightFn& w, const AffineFunction& l,
                                    Normalization norm = Normalization::Polytope, const QuadratureOptions& opts = {}) {
  if (v.dim() != p.dim() || w.dim() != p.dim() || l.dim() != p.dim())
    throw Error(ErrorKind::InvalidInput, "weights and direction must match the polytope dimension");
  const Polynomial lp = Polynomial::from_affine(l);
  const QuadratureResult b = integrate_boundary(p, v * lp, opts);
  const QuadratureResult i = integrate_weighted(p, w * lp, opts);
  const double kappa = normalization_factor(norm, p.dim());
  FutakiReport rep;
  rep.direction = l;
  rep.value = kappa * (2 * b.value - i.value);
  rep.error_estimate = kappa * (2 * b.error_estimate + i.error_estimate);
  rep.method = FutakiMethod::BoundaryFormula;
  rep.normalization = norm;
  if (b.exact && i.exact) {
    rep.exact = 2 * *b.exact - *i.exact;
    rep.value = kappa * to_double(*rep.exact);
  }
  return rep;
}

inline std::vector<FutakiReport> futaki_all_affine(const DelzantPolytope& p, const WeightFn& v, const WeightFn& w,
                                                   Normalization norm = Normalization::Polytope, const QuadratureOptions& opts = {}) {
  std::vector<FutakiReport> out;
  for (const auto& l : affine_basis(p.dim())) out.push_back(futaki_boundary(p, v, w, l, norm, opts));
  return out;
}

struct ExtremalFunction {
  AffineFunction ell;                  // l^ext
  Eigen::VectorXd coefficients;        // in the basis 1, x_1, ..., x_r
  bool exact = false;                  // solved in rational arithmetic
  double gram_condition_number = 0.0;  // 2-norm
  double gram_min_eigenvalue = 0.0;
  Eigen::MatrixXd gram;
  Eigen::VectorXd rhs;
  std::vector<FutakiReport> residuals;  // Fut_{v, w0 l^ext - v extra} on the basis
};

/// Largest acceptable Gram condition number.
inline constexpr double kMaxGramCondition = 1e12;

/// Solves for the affine l^ext making Fut_{v, w0 l^ext - v extra} vanish on
/// every affine direction.
inline ExtremalFunction extremal_affine(const DelzantPolytope& p, const WeightFn& v, const WeightFn& w0,
                                        const std::optional<WeightFn>& extra = std::nullopt, const QuadratureOptions& opts = {}) {
  const int r = p.dim();
  require_positive(v, p, "v");
  require_positive(w0, p, "w0");
  const auto basis = affine_basis(r);
  std::vector<Polynomial> bp;
  for (const auto& l : basis) bp.push_back(Polynomial::from_affine(l));

  const std::size_t n = basis.size();
  RatMatrix gq(n, RatVec(n));
  RatVec rq(n);
  bool exact = true;
  ExtremalFunction out;
  out.gram = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  out.rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const QuadratureResult q = integrate_weighted(p, w0 * (bp[i] * bp[j]), opts);
      out.gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = out.gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = q.value;
      if (q.exact)
        gq[i][j] = gq[j][i] = *q.exact;
      else
        exact = false;
    }
    const QuadratureResult b = integrate_boundary(p, v * bp[i], opts);
    double rhs = 2 * b.value;
    Rational rhs_q = b.exact ? Rational(2 * *b.exact) : Rational(0);
    if (!b.exact) exact = false;
    if (extra) {
      const QuadratureResult e = integrate_weighted(p, v * *extra * bp[i], opts);
      rhs += e.value;
      if (e.exact)
        rhs_q += *e.exact;
      else
        exact = false;
    }
    out.rhs[static_cast<Eigen::Index>(i)] = exact ? to_double(rhs_q) : rhs;
    rq[i] = rhs_q;
  }
  if (exact)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out.gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = to_double(gq[i][j]);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(out.gram);
  out.gram_min_eigenvalue = eig.eigenvalues().minCoeff();
  out.gram_condition_number = eig.eigenvalues().maxCoeff() / out.gram_min_eigenvalue;
  if (!(out.gram_min_eigenvalue > 0) || out.gram_condition_number > kMaxGramCondition)
    throw Error(ErrorKind::IllConditioned, "Gram matrix condition number " + WeightFn::fmt_double(out.gram_condition_number) + " exceeds threshold");

  RatVec coef_q;
  if (exact) {
    auto sol = solve_exact(gq, rq);
    if (!sol) throw Error(ErrorKind::IllConditioned, "Gram matrix is singular");
    coef_q = *sol;
    out.coefficients = Eigen::VectorXd(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) out.coefficients[static_cast<Eigen::Index>(i)] = to_double(coef_q[i]);
  } else {
    out.coefficients = out.gram.ldlt().solve(out.rhs);
    for (std::size_t i = 0; i < n; ++i) coef_q.push_back(exact_rational(out.coefficients[static_cast<Eigen::Index>(i)]));
  }
  out.exact = exact;
  out.ell = AffineFunction(RatVec(coef_q.begin() + 1, coef_q.end()), coef_q[0]);

  WeightFn w = w0 * Polynomial::from_affine(out.ell);
  if (extra) w = w - v * *extra;
  out.residuals = futaki_all_affine(p, v, w, Normalization::Polytope, opts);
  return out;
}

/// int x v dx / int v dx.
inline Vec barycenter(const DelzantPolytope& p, const WeightFn& v, const QuadratureOptions& opts = {}) {
  require_positive(v, p, "v");
  const int r = p.dim();
  const double mass = integrate_weighted(p, v, opts).value;
  Vec b(r);
  for (int i = 0; i < r; ++i) b[i] = integrate_weighted(p, v * Polynomial::variable(r, i), opts).value / mass;
  return b;
}

/// Exact barycenter for polynomial v.
inline RatVec barycenter_exact(const DelzantPolytope& p, const Polynomial& v) {
  const int r = p.dim();
  const Rational mass = integrate_poly(p, v);
  if (mass == 0) throw Error(ErrorKind::NotPositive, "weight has zero mass");
  RatVec b;
  for (int i = 0; i < r; ++i) b.push_back(integrate_poly(p, v * Polynomial::variable(r, i)) / mass);
  return b;
}

}  // namespace wkstab
