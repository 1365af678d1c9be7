#pragma once

// Toric Kahler metrics in action coordinates, used as an independent
// oracle for the Futaki invariant.
//
// A symplectic potential u on the polytope gives G = Hess u and the torus
// metric H = G^{-1}. With d_i = sum_j dH_ij/dx_j,
//
//   Scal   = -sum_ij d_i d_j H_ij          = -div d
//   Scal_v = -sum_ij d_i d_j (v H_ij)      = -div(H grad v + v d)
//          = v Scal + 2 Lap v + <H, Hess v>,  Lap f = -div(H grad f).
//
// H and d are analytic (dH = -H dG H); only the outer divergence is taken
// by central differences.

#include <boost/math/quadrature/gauss.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "wkstab/affine.hpp"
#include "wkstab/error.hpp"
#include "wkstab/invariants.hpp"
#include "wkstab/polynomial.hpp"
#include "wkstab/polytope.hpp"
#include "wkstab/weights.hpp"

namespace wkstab {

class SymplecticPotential {
 public:
  enum class Kind { Guillemin, GuilleminPlusBump };

  /// u = 1/2 sum_j L_j log L_j.
  static SymplecticPotential guillemin(const DelzantPolytope& p) { return SymplecticPotential(p, Polynomial(p.dim())); }

  /// u_G + phi; throws NotPositiveDefinite if Hess u fails to be positive
  /// at one of `samples` interior points.
  static SymplecticPotential with_bump(const DelzantPolytope& p, const Polynomial& phi, int samples = 2000) {
    if (phi.dim() != p.dim()) throw Error(ErrorKind::InvalidInput, "bump dimension does not match polytope");
    SymplecticPotential u(p, phi);
    for (const auto& x : detail::sample_points(p, samples, 2024)) {
      const double lam = u.hessian_min_eigenvalue(x);
      if (!(lam > 0))
        throw Error(ErrorKind::NotPositiveDefinite, "Hess(u_G + phi) has eigenvalue " + WeightFn::fmt_double(lam) + " at an interior point");
    }
    return u;
  }

  Kind kind() const { return bump_.is_zero() ? Kind::Guillemin : Kind::GuilleminPlusBump; }
  const DelzantPolytope& polytope() const { return polytope_; }
  const Polynomial& bump() const { return bump_; }
  int dim() const { return r_; }

  double min_facet_value(const Vec& x) const { return (normals_ * x + offsets_).minCoeff(); }

  /// Hess u at x.
  Mat hessian(const Vec& x) const {
    require_interior(x);
    const Eigen::VectorXd l = normals_ * x + offsets_;
    Mat g = Mat::Zero(r_, r_);
    for (Eigen::Index f = 0; f < normals_.rows(); ++f) g += normals_.row(f).transpose() * normals_.row(f) / (2 * l[f]);
    if (!bump_hess_.empty())
      for (int i = 0; i < r_; ++i)
        for (int j = 0; j < r_; ++j) g(i, j) += bump_hess_[idx(i, j)].eval(x);
    return g;
  }

  double hessian_min_eigenvalue(const Vec& x) const {
    Eigen::SelfAdjointEigenSolver<Mat> eig(hessian(x));
    return eig.eigenvalues().minCoeff();
  }

  /// H = (Hess u)^{-1}.
  Mat hess_inv(const Vec& x) const {
    Eigen::LLT<Mat> llt(hessian(x));
    if (llt.info() != Eigen::Success) throw Error(ErrorKind::NotPositiveDefinite, "Hess u is not positive definite at an evaluation point");
    return llt.solve(Mat::Identity(r_, r_));
  }

  /// H and its divergence d_i = sum_j dH_ij/dx_j, both analytic.
  void metric(const Vec& x, Mat& h, Vec& d) const {
    h = hess_inv(x);
    const Eigen::VectorXd l = normals_ * x + offsets_;
    d = Vec::Zero(r_);
    for (int j = 0; j < r_; ++j) {
      // dG/dx_j
      Mat dg = Mat::Zero(r_, r_);
      for (Eigen::Index f = 0; f < normals_.rows(); ++f)
        dg -= normals_(f, j) * normals_.row(f).transpose() * normals_.row(f) / (2 * l[f] * l[f]);
      if (!bump_third_.empty())
        for (int a = 0; a < r_; ++a)
          for (int b = 0; b < r_; ++b) dg(a, b) += bump_third_[idx(a, b) * static_cast<std::size_t>(r_) + static_cast<std::size_t>(j)].eval(x);
      // column j of dH/dx_j = -H dG H
      d -= h * dg * h.col(j);
    }
  }

 private:
  SymplecticPotential(const DelzantPolytope& p, const Polynomial& phi) : polytope_(p), bump_(phi), r_(p.dim()) {
    const auto& hs = p.halfspaces();
    normals_ = Mat(static_cast<Eigen::Index>(hs.size()), r_);
    offsets_ = Eigen::VectorXd(static_cast<Eigen::Index>(hs.size()));
    for (std::size_t f = 0; f < hs.size(); ++f) {
      for (int i = 0; i < r_; ++i) normals_(static_cast<Eigen::Index>(f), i) = static_cast<double>(hs[f].normal[static_cast<std::size_t>(i)]);
      offsets_[static_cast<Eigen::Index>(f)] = to_double(hs[f].offset);
    }
    if (!phi.is_zero()) {
      for (int i = 0; i < r_; ++i)
        for (int j = 0; j < r_; ++j) {
          const Polynomial pij = phi.derivative(i).derivative(j);
          bump_hess_.emplace_back(pij);
          for (int k = 0; k < r_; ++k) bump_third_.emplace_back(pij.derivative(k));
        }
    }
  }

  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i * r_ + j); }

  void require_interior(const Vec& x) const {
    if (!(min_facet_value(x) > 0)) throw Error(ErrorKind::TooCloseToBoundary, "point is not in the open polytope");
  }

  DelzantPolytope polytope_;
  Polynomial bump_;
  int r_;
  Mat normals_;
  Eigen::VectorXd offsets_;
  std::vector<CompiledPolynomial> bump_hess_;   // r x r
  std::vector<CompiledPolynomial> bump_third_;  // r x r x r
};

namespace detail {

/// Central stencils x +- h e_i must stay in the open polytope.
inline void require_stencil(const SymplecticPotential& u, const Vec& x, double h) {
  if (!(h > 0)) throw Error(ErrorKind::InvalidInput, "finite-difference step must be positive");
  const auto& hs = u.polytope().halfspaces();
  for (const auto& f : hs) {
    double l = to_double(f.offset), reach = 0;
    for (std::size_t i = 0; i < f.normal.size(); ++i) {
      l += static_cast<double>(f.normal[i]) * x[static_cast<Eigen::Index>(i)];
      reach = std::max(reach, std::abs(static_cast<double>(f.normal[i])));
    }
    if (!(l > h * reach))
      throw Error(ErrorKind::TooCloseToBoundary,
                  "difference stencil leaves the polytope (L = " + WeightFn::fmt_double(l) + ", h = " + WeightFn::fmt_double(h) + ")");
  }
}

/// -sum_i dF_i/dx_i by central differences.
template <class Field>
double divergence(const SymplecticPotential& u, const Vec& x, double h, Field field) {
  require_stencil(u, x, h);
  double s = 0;
  Vec y = x;
  for (int i = 0; i < u.dim(); ++i) {
    y[i] = x[i] + h;
    const double fp = field(y)[i];
    y[i] = x[i] - h;
    const double fm = field(y)[i];
    y[i] = x[i];
    s += (fp - fm) / (2 * h);
  }
  return -s;
}

}  // namespace detail

inline double scal(const SymplecticPotential& u, const Vec& x, double h = 1e-4) {
  return detail::divergence(u, x, h, [&](const Vec& y) {
    Mat hm;
    Vec d;
    u.metric(y, hm, d);
    return d;
  });
}

/// v Scal + 2 Lap v + <H, Hess v>, with v derivatives analytic.
inline double scal_v_direct(const SymplecticPotential& u, const WeightFn& v, const Vec& x, double h = 1e-4) {
  const double s = scal(u, x, h);
  Mat hm;
  Vec d;
  u.metric(x, hm, d);
  const Jet j = v.jet(x);
  const double trace = (hm.cwiseProduct(j.hess)).sum();
  const double lap = -(d.dot(j.grad) + trace);
  return j.value * s + 2 * lap + trace;
}

/// -div(H grad v + v d).
inline double scal_v_divergence(const SymplecticPotential& u, const WeightFn& v, const Vec& x, double h = 1e-4) {
  return detail::divergence(u, x, h, [&](const Vec& y) {
    Mat hm;
    Vec d;
    u.metric(y, hm, d);
    const Jet j = v.jet(y);
    return Vec(hm * j.grad + j.value * d);
  });
}

struct GridSpec {
  int points_per_axis = 400;  // rounded up to whole 8-point Gauss panels
  double margin = 0.0;        // interior margin eps on every L_j; 0 means 1e-3 * inradius
  double h = 1e-4;            // finite-difference step
  int threads = 0;            // 0 means WKSTAB_THREADS
};

inline double resolved_margin(const DelzantPolytope& p, const GridSpec& g) { return g.margin > 0 ? g.margin : 1e-3 * p.centroid_inradius(); }

struct NumericFutaki {
  AffineFunction direction;
  double value = 0.0;
  double truncation_estimate = 0.0;  // distance to the first-order extrapolation
  double grid_estimate = 0.0;        // full grid vs half grid at eps
  double error_estimate() const { return truncation_estimate + grid_estimate; }
};

namespace detail {

/// Composite Gauss-Legendre nodes and weights on [0, 1].
inline void gauss_panels(int panels, std::vector<double>& nodes, std::vector<double>& weights) {
  using rule = boost::math::quadrature::gauss<double, 8>;
  const auto& a = rule::abscissa();
  const auto& w = rule::weights();
  nodes.clear();
  weights.clear();
  const double width = 1.0 / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * width;
    for (std::size_t k = 0; k < a.size(); ++k) {
      nodes.push_back(mid - 0.5 * width * a[k]);
      weights.push_back(0.5 * width * w[k]);
      nodes.push_back(mid + 0.5 * width * a[k]);
      weights.push_back(0.5 * width * w[k]);
    }
  }
}

/// Worker count from WKSTAB_THREADS (default 1).
inline int thread_count() {
  const char* env = std::getenv("WKSTAB_THREADS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return n >= 1 ? std::min(n, 256) : 1;
}

/// Integrates a vector integrand over a simplex with the collapsed map
/// x = v0 + u1 (v1 - v0) + u1 u2 (v2 - v1) + ..., Jacobian
/// |det| u1^{r-1} u2^{r-2} ... . Partial sums are kept per outer node and
/// added in order, so the result does not depend on the thread count.
template <class F>
Eigen::VectorXd integrate_collapsed(const std::vector<Vec>& s, const std::vector<double>& nodes, const std::vector<double>& weights,
                                    Eigen::Index components, F f, int threads) {
  const int r = static_cast<int>(s.size()) - 1;
  Mat m(r, r);
  for (int k = 0; k < r; ++k) m.col(k) = s[static_cast<std::size_t>(k) + 1] - s[0];
  const double det = std::abs(m.determinant());
  const std::size_t n = nodes.size();
  std::vector<Eigen::VectorXd> part(n, Eigen::VectorXd::Zero(components));

  auto slab = [&](std::size_t first) {
    std::vector<std::size_t> it(static_cast<std::size_t>(r), 0);
    it[0] = first;
    Eigen::VectorXd& acc = part[first];
    while (true) {
      Vec x = s[0];
      double jac = det, prod = 1.0;
      for (int k = 0; k < r; ++k) {
        const double uk = nodes[it[static_cast<std::size_t>(k)]];
        prod *= uk;
        x += prod * (s[static_cast<std::size_t>(k) + 1] - s[static_cast<std::size_t>(k)]);
        jac *= std::pow(uk, r - 1 - k) * weights[it[static_cast<std::size_t>(k)]];
      }
      acc += jac * f(x);
      int k = r - 1;
      for (; k >= 1; --k) {
        if (++it[static_cast<std::size_t>(k)] < n) break;
        it[static_cast<std::size_t>(k)] = 0;
      }
      if (k < 1) break;
    }
  };

  const int t = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (t == 1) {
    for (std::size_t i = 0; i < n; ++i) slab(i);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(t));
    for (int w = 0; w < t; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = static_cast<std::size_t>(w); i < n; i += static_cast<std::size_t>(t)) slab(i);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  Eigen::VectorXd total = Eigen::VectorXd::Zero(components);
  for (const auto& p : part) total += p;
  return total;
}

}  // namespace detail

/// int_{Delta_eps} (Scal_v(u) - w) l dx for every l in `directions`, with
/// Delta_eps = {L_j >= eps}. The truncation error is smooth in eps, so
/// I(eps), I(2 eps), I(4 eps) are extrapolated to eps = 0 with the first
/// two orders removed.
inline std::vector<NumericFutaki> futaki_numeric_all(const DelzantPolytope& p, const SymplecticPotential& u, const WeightFn& v, const WeightFn& w,
                                                     const std::vector<AffineFunction>& directions, const GridSpec& grid = {}) {
  const double eps = resolved_margin(p, grid);
  if (!(eps > 2 * grid.h) || !(4 * eps < p.centroid_inradius())) throw Error(ErrorKind::InvalidInput, "grid margin must exceed 2h and stay below a quarter of the inradius");
  if (grid.points_per_axis < 8) throw Error(ErrorKind::InvalidInput, "grid needs at least 8 points per axis");
  v.require_finite_on(p);
  w.require_finite_on(p);
  const int panels = (grid.points_per_axis + 7) / 8;
  const Eigen::Index nd = static_cast<Eigen::Index>(directions.size());

  auto run = [&](double margin, int npanels) {
    std::vector<double> nodes, weights;
    detail::gauss_panels(npanels, nodes, weights);
    const DelzantPolytope shrunk = p.shrunk(exact_rational(margin));
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(nd);
    for (const auto& s : numeric_simplices(shrunk)) {
      acc += detail::integrate_collapsed(
          s, nodes, weights, nd,
          [&](const Vec& x) {
            const double g = scal_v_divergence(u, v, x, grid.h) - w.eval(x);
            Eigen::VectorXd out(nd);
            for (Eigen::Index k = 0; k < nd; ++k) out[k] = g * directions[static_cast<std::size_t>(k)].eval(x);
            return out;
          },
          grid.threads > 0 ? grid.threads : detail::thread_count());
    }
    return acc;
  };
  const Eigen::VectorXd i1 = run(eps, panels);
  const Eigen::VectorXd i2 = run(2 * eps, panels);
  const Eigen::VectorXd i4 = run(4 * eps, panels);
  const Eigen::VectorXd coarse = run(eps, std::max(1, panels / 2));
  std::vector<NumericFutaki> out;
  for (Eigen::Index k = 0; k < nd; ++k) {
    NumericFutaki f;
    f.direction = directions[static_cast<std::size_t>(k)];
    f.value = (8 * i1[k] - 6 * i2[k] + i4[k]) / 3;
    f.truncation_estimate = std::abs(f.value - (2 * i1[k] - i2[k]));
    f.grid_estimate = std::abs(i1[k] - coarse[k]);
    out.push_back(f);
  }
  return out;
}

inline FutakiReport futaki_numeric(const DelzantPolytope& p, const SymplecticPotential& u, const WeightFn& v, const WeightFn& w,
                                   const AffineFunction& l, const GridSpec& grid = {}, Normalization norm = Normalization::Polytope) {
  const NumericFutaki f = futaki_numeric_all(p, u, v, w, {l}, grid).front();
  const double kappa = normalization_factor(norm, p.dim());
  FutakiReport rep;
  rep.direction = l;
  rep.value = kappa * f.value;
  rep.error_estimate = kappa * f.error_estimate();
  rep.method = FutakiMethod::MetricNumeric;
  rep.normalization = norm;
  return rep;
}

/// Random polynomial of total degree <= `degree` (at least 3) with
/// coefficients in [-1, 1], centered at the vertex centroid.
inline Polynomial random_bump_polynomial(const DelzantPolytope& p, int degree, std::mt19937_64& rng) {
  const int r = p.dim();
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  Polynomial phi(r);
  std::vector<int> e(static_cast<std::size_t>(r), 0);
  // Every exponent vector of total degree 2..degree.
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == r) {
      int total = 0;
      for (int k : e) total += k;
      if (total >= 2) {
        Exponent ex(e.begin(), e.end());
        phi.add_term(ex, exact_rational(std::round(coef(rng) * 64) / 64));
      }
      return;
    }
    for (int k = 0; k <= left; ++k) {
      e[static_cast<std::size_t>(i)] = k;
      rec(i + 1, left - k);
    }
    e[static_cast<std::size_t>(i)] = 0;
  };
  rec(0, degree);
  const RatVec c = p.vertex_centroid();
  RatMatrix id(static_cast<std::size_t>(r), RatVec(static_cast<std::size_t>(r), Rational(0)));
  RatVec shift(static_cast<std::size_t>(r));
  for (std::size_t i = 0; i < static_cast<std::size_t>(r); ++i) {
    id[i][i] = 1;
    shift[i] = -c[i];
  }
  return phi.compose(AffineMap{shift, id});
}

/// u_G + s phi with s halved from `scale` until Hess u is positive definite,
/// with at least a quarter of the Guillemin eigenvalue left, on the samples.
inline SymplecticPotential admissible_bump(const DelzantPolytope& p, const Polynomial& phi, double scale = 0.5, int samples = 2000) {
  const SymplecticPotential g = SymplecticPotential::guillemin(p);
  const auto pts = detail::sample_points(p, samples, 77);
  for (int halving = 0; halving < 40; ++halving, scale *= 0.5) {
    const Polynomial bump = phi * exact_rational(scale);
    const SymplecticPotential u = SymplecticPotential::with_bump(p, bump, 0);
    bool ok = true;
    for (const auto& x : pts)
      if (!(u.hessian_min_eigenvalue(x) >= 0.25 * g.hessian_min_eigenvalue(x))) {
        ok = false;
        break;
      }
    if (ok) return SymplecticPotential::with_bump(p, bump, samples);
  }
  throw Error(ErrorKind::NotPositiveDefinite, "no admissible scale found for the bump");
}

}  // namespace wkstab
