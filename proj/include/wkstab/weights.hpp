#pragma once

// Weight functions on the moment polytope. A WeightFn is a finite sum of
// grammar terms
//
//     c * P(x) * prod_i (<zeta_i, x> + a_i)^{p_i} * exp(<eta, x> + b)
//
// with P a rational polynomial and real exponents p_i. The grammar is
// closed under sums, products, affine pullback and the Euler operator
// x . grad, which is all the soliton / Sasaki / fibration weights need.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "wkstab/affine.hpp"
#include "wkstab/error.hpp"
#include "wkstab/polynomial.hpp"
#include "wkstab/polytope.hpp"

namespace wkstab {

struct AffinePower {
  AffineFunction base;
  double exponent = 1.0;
};

inline bool is_integer(double p) { return std::floor(p) == p; }

struct Jet {
  double value = 0.0;
  Vec grad;
  Mat hess;
};

class WeightTerm {
 public:
  WeightTerm() = default;
  explicit WeightTerm(int dim, double scalar = 1.0) : dim_(dim), scalar_(scalar) {}

  int dim() const { return dim_; }
  double scalar() const { return scalar_; }
  const std::vector<AffinePower>& powers() const { return powers_; }
  const std::optional<AffineFunction>& exp_part() const { return exp_; }
  const std::optional<Polynomial>& poly() const { return poly_; }

  WeightTerm& set_scalar(double c) {
    scalar_ = c;
    return *this;
  }
  WeightTerm& multiply_power(const AffineFunction& base, double exponent) {
    if (base.dim() != dim_) throw Error(ErrorKind::InvalidInput, "affine factor dimension mismatch");
    if (exponent == 0.0) return *this;
    // Constant bases fold into the scalar.
    if (base.is_constant()) {
      scalar_ *= std::pow(to_double(base.a()), exponent);
      return *this;
    }
    auto it = std::find_if(powers_.begin(), powers_.end(), [&](const AffinePower& f) { return f.base == base; });
    if (it != powers_.end()) {
      it->exponent += exponent;
      if (it->exponent == 0.0) powers_.erase(it);
    } else {
      powers_.push_back({base, exponent});
      std::sort(powers_.begin(), powers_.end(), [](const AffinePower& a, const AffinePower& b) { return a.base < b.base; });
    }
    return *this;
  }
  WeightTerm& multiply_exp(const AffineFunction& e) {
    if (e.dim() != dim_) throw Error(ErrorKind::InvalidInput, "exp factor dimension mismatch");
    exp_ = exp_ ? *exp_ + e : e;
    if (exp_->is_constant()) {
      scalar_ *= std::exp(to_double(exp_->a()));
      exp_.reset();
    }
    return *this;
  }
  WeightTerm& multiply_poly(const Polynomial& p) {
    if (p.dim() != dim_) throw Error(ErrorKind::InvalidInput, "polynomial factor dimension mismatch");
    Polynomial q = poly_ ? *poly_ * p : p;
    // A constant polynomial folds into the scalar when it is exactly a double.
    if (q.degree() == 0) {
      Rational c = q.is_zero() ? Rational(0) : q.terms().begin()->second;
      if (exact_rational(to_double(c)) == c) {
        scalar_ *= to_double(c);
        poly_.reset();
        compile();
        return *this;
      }
    }
    poly_ = std::move(q);
    compile();
    return *this;
  }

  WeightTerm operator*(const WeightTerm& o) const {
    WeightTerm t = *this;
    t.scalar_ *= o.scalar_;
    for (const auto& f : o.powers_) t.multiply_power(f.base, f.exponent);
    if (o.exp_) t.multiply_exp(*o.exp_);
    if (o.poly_) t.multiply_poly(*o.poly_);
    return t;
  }

  bool is_polynomial() const {
    if (exp_) return false;
    return std::all_of(powers_.begin(), powers_.end(), [](const AffinePower& f) { return f.exponent >= 0 && is_integer(f.exponent); });
  }

  /// Exact expansion; requires is_polynomial().
  Polynomial as_polynomial() const {
    Polynomial p = Polynomial::constant(dim_, exact_rational(scalar_));
    if (poly_) p = p * *poly_;
    for (const auto& f : powers_) p = p * Polynomial::from_affine(f.base).pow(static_cast<int>(f.exponent));
    return p;
  }

  WeightTerm pullback(const AffineMap& m) const {
    WeightTerm t(m.source_dim(), scalar_);
    for (const auto& f : powers_) t.multiply_power(f.base.pullback(m), f.exponent);
    if (exp_) t.multiply_exp(exp_->pullback(m));
    if (poly_) t.multiply_poly(poly_->compose(m));
    return t;
  }

  /// x . grad(term) as a sum of terms.
  std::vector<WeightTerm> euler() const {
    std::vector<WeightTerm> out;
    auto linear_part = [&](const AffineFunction& l) { return Polynomial::from_affine(AffineFunction(l.zeta(), Rational(0))); };
    if (poly_) {
      Polynomial e = poly_->euler();
      if (!e.is_zero()) {
        WeightTerm t = *this;
        t.poly_.reset();
        t.multiply_poly(e);
        out.push_back(std::move(t));
      }
    }
    for (const auto& f : powers_) {
      WeightTerm t = *this;
      t.scalar_ *= f.exponent;
      t.multiply_power(f.base, -1.0);
      t.multiply_poly(linear_part(f.base));
      out.push_back(std::move(t));
    }
    if (exp_) {
      WeightTerm t = *this;
      t.multiply_poly(linear_part(*exp_));
      out.push_back(std::move(t));
    }
    return out;
  }

  double eval(const Vec& x) const {
    double v = scalar_;
    if (poly_) v *= poly_jet_.eval(x);
    for (const auto& f : powers_) v *= power_value(f, x);
    if (exp_) v *= std::exp(exp_->eval(x));
    return v;
  }

  /// Value, gradient and Hessian by the product rule over factors.
  Jet jet(const Vec& x) const {
    struct FactorJet {
      double f;
      Vec g;
      Mat h;
    };
    std::vector<FactorJet> factors;
    factors.reserve(powers_.size() + 2);
    if (poly_) factors.push_back({poly_jet_.eval(x), poly_jet_.grad(x), poly_jet_.hess(x)});
    for (const auto& fp : powers_) {
      const double a = fp.base.eval(x);
      check_domain(fp, a);
      const double p = fp.exponent;
      const Vec& z = fp.base.zeta_d();
      const double f = std::pow(a, p);
      const double d1 = p * std::pow(a, p - 1.0);
      const double d2 = p * (p - 1.0) * std::pow(a, p - 2.0);
      factors.push_back({f, d1 * z, d2 * z * z.transpose()});
    }
    if (exp_) {
      const double e = std::exp(exp_->eval(x));
      const Vec& z = exp_->zeta_d();
      factors.push_back({e, e * z, e * z * z.transpose()});
    }
    Jet j;
    j.grad = Vec::Zero(dim_);
    j.hess = Mat::Zero(dim_, dim_);
    const std::size_t k = factors.size();
    auto prod_except = [&](std::size_t a, std::size_t b) {
      double p = scalar_;
      for (std::size_t i = 0; i < k; ++i)
        if (i != a && i != b) p *= factors[i].f;
      return p;
    };
    j.value = prod_except(k, k);
    for (std::size_t a = 0; a < k; ++a) {
      const double pa = prod_except(a, k);
      j.grad += pa * factors[a].g;
      j.hess += pa * factors[a].h;
      for (std::size_t b = 0; b < k; ++b)
        if (b != a) j.hess += prod_except(a, b) * factors[a].g * factors[b].g.transpose();
    }
    return j;
  }

 private:
  static void check_domain(const AffinePower& f, double a) {
    if (a < 0 && !is_integer(f.exponent))
      throw Error(ErrorKind::DomainViolation, "negative base " + f.base.to_string() + " with non-integer exponent");
    if (a == 0 && f.exponent < 0) throw Error(ErrorKind::DomainViolation, "zero base " + f.base.to_string() + " with negative exponent");
  }
  static double power_value(const AffinePower& f, const Vec& x) {
    const double a = f.base.eval(x);
    check_domain(f, a);
    return std::pow(a, f.exponent);
  }
  void compile() {
    if (poly_) poly_jet_ = PolynomialJet(*poly_);
  }

  int dim_ = 0;
  double scalar_ = 1.0;
  std::vector<AffinePower> powers_;
  std::optional<AffineFunction> exp_;
  std::optional<Polynomial> poly_;
  PolynomialJet poly_jet_;
};

enum class Positivity { Positive, NotPositive, Indeterminate };

inline const char* to_string(Positivity p) {
  switch (p) {
    case Positivity::Positive: return "Positive";
    case Positivity::NotPositive: return "NotPositive";
    case Positivity::Indeterminate: return "Indeterminate";
  }
  return "?";
}

class WeightFn {
 public:
  WeightFn() = default;
  explicit WeightFn(int dim) : dim_(dim) {}
  WeightFn(int dim, std::vector<WeightTerm> terms) : dim_(dim), terms_(std::move(terms)) {}

  static WeightFn constant(int dim, double c) { return WeightFn(dim, {WeightTerm(dim, c)}); }
  static WeightFn polynomial(const Polynomial& p) {
    WeightTerm t(p.dim());
    t.multiply_poly(p);
    return WeightFn(p.dim(), {t});
  }
  static WeightFn affine_power(const AffineFunction& l, double exponent, double scalar = 1.0) {
    WeightTerm t(l.dim(), scalar);
    t.multiply_power(l, exponent);
    return WeightFn(l.dim(), {t});
  }
  static WeightFn exp_affine(const AffineFunction& l) {
    WeightTerm t(l.dim());
    t.multiply_exp(l);
    return WeightFn(l.dim(), {t});
  }

  int dim() const { return dim_; }
  const std::vector<WeightTerm>& terms() const { return terms_; }

  WeightFn operator+(const WeightFn& o) const {
    WeightFn s = *this;
    s.terms_.insert(s.terms_.end(), o.terms_.begin(), o.terms_.end());
    return s;
  }
  WeightFn operator-(const WeightFn& o) const { return *this + o * -1.0; }
  WeightFn operator*(double c) const {
    WeightFn s = *this;
    for (auto& t : s.terms_) t.set_scalar(t.scalar() * c);
    return s;
  }
  WeightFn operator*(const WeightFn& o) const {
    WeightFn s(dim_);
    for (const auto& a : terms_)
      for (const auto& b : o.terms_) s.terms_.push_back(a * b);
    return s;
  }
  WeightFn operator*(const Polynomial& p) const {
    WeightFn s = *this;
    for (auto& t : s.terms_) t.multiply_poly(p);
    return s;
  }

  double eval(const Vec& x) const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.eval(x);
    return s;
  }
  Vec grad(const Vec& x) const { return jet(x).grad; }
  Jet jet(const Vec& x) const {
    Jet j;
    j.grad = Vec::Zero(dim_);
    j.hess = Mat::Zero(dim_, dim_);
    for (const auto& t : terms_) {
      Jet tj = t.jet(x);
      j.value += tj.value;
      j.grad += tj.grad;
      j.hess += tj.hess;
    }
    return j;
  }

  bool is_polynomial() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const WeightTerm& t) { return t.is_polynomial(); });
  }
  Polynomial as_polynomial() const {
    Polynomial p(dim_);
    for (const auto& t : terms_) p += t.as_polynomial();
    return p;
  }

  WeightFn pullback(const AffineMap& m) const {
    WeightFn s(m.source_dim());
    for (const auto& t : terms_) s.terms_.push_back(t.pullback(m));
    return s;
  }

  /// x . grad(w).
  WeightFn euler() const {
    WeightFn s(dim_);
    for (const auto& t : terms_) {
      auto e = t.euler();
      s.terms_.insert(s.terms_.end(), e.begin(), e.end());
    }
    return s;
  }

  /// Throws SingularOnDomain unless every term is finite on the closed
  /// polytope. Affine minima are attained at vertices, so the test is exact.
  void require_finite_on(const DelzantPolytope& p) const {
    for (const auto& t : terms_)
      for (const auto& f : t.powers()) {
        if (f.exponent >= 0 && is_integer(f.exponent)) continue;
        const Rational m = p.min_over(f.base);
        if (f.exponent < 0 && m <= 0)
          throw Error(ErrorKind::SingularOnDomain, "factor (" + f.base.to_string() + ")^" + fmt_double(f.exponent) +
                                                       " vanishes or changes sign on the polytope (min " + to_string(m) + ")");
        if (f.exponent > 0 && m < 0)
          throw Error(ErrorKind::SingularOnDomain, "factor (" + f.base.to_string() + ")^" + fmt_double(f.exponent) +
                                                       " is negative somewhere on the polytope");
      }
  }

  /// Smallest value of min_j L_j over vertices at which a negative-power
  /// factor is evaluated, i.e. the distance (in affine units) to a pole.
  double feasibility_margin(const DelzantPolytope& p) const {
    double m = INFINITY;
    for (const auto& t : terms_)
      for (const auto& f : t.powers())
        if (f.exponent < 0) m = std::min(m, to_double(p.min_over(f.base)));
    return m;
  }

  Positivity positivity_on(const DelzantPolytope& p, int bernstein_depth = 8, int samples = 2000) const;

  static std::string fmt_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }

 private:
  int dim_ = 0;
  std::vector<WeightTerm> terms_;
};

namespace detail {

inline Rational binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  Rational b = 1;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

/// All Bernstein coefficients of f on the simplex are > 0 (a sufficient
/// certificate of positivity on the closed simplex).
inline bool bernstein_positive(const Polynomial& f, const Simplex& s) {
  const int r = s.dim();
  AffineMap m;
  m.origin = s.vertices[0];
  m.linear.assign(static_cast<std::size_t>(r), RatVec(static_cast<std::size_t>(r)));
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < r; ++k)
      m.linear[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
          s.vertices[static_cast<std::size_t>(k + 1)][static_cast<std::size_t>(i)] - s.vertices[0][static_cast<std::size_t>(i)];
  const Polynomial g = f.compose(m);
  const int d = std::max(f.degree(), 0);
  // Enumerate gamma' with |gamma'| <= d.
  Exponent gamma(static_cast<std::size_t>(r), 0);
  std::function<bool(int, int)> rec = [&](int i, int budget) -> bool {
    if (i == r) {
      Rational b = 0;
      for (const auto& [beta, a] : g.terms()) {
        bool le = true;
        for (int k = 0; k < r; ++k)
          if (beta[static_cast<std::size_t>(k)] > gamma[static_cast<std::size_t>(k)]) le = false;
        if (!le) continue;
        Rational num = 1, den = factorial(d);
        int total = 0;
        for (int k = 0; k < r; ++k) {
          num *= binomial(gamma[static_cast<std::size_t>(k)], beta[static_cast<std::size_t>(k)]);
          den /= factorial(beta[static_cast<std::size_t>(k)]);
          total += beta[static_cast<std::size_t>(k)];
        }
        den /= factorial(d - total);
        b += num / den * a;
      }
      return b > 0;
    }
    for (int v = 0; v <= budget; ++v) {
      gamma[static_cast<std::size_t>(i)] = v;
      if (!rec(i + 1, budget - v)) return false;
    }
    return true;
  };
  return rec(0, d);
}

inline std::pair<Simplex, Simplex> bisect_longest_edge(const Simplex& s) {
  const auto& v = s.vertices;
  std::size_t ba = 0, bb = 1;
  Rational best = -1;
  for (std::size_t a = 0; a < v.size(); ++a)
    for (std::size_t b = a + 1; b < v.size(); ++b) {
      Rational len = 0;
      for (std::size_t k = 0; k < v[a].size(); ++k) len += (v[a][k] - v[b][k]) * (v[a][k] - v[b][k]);
      if (len > best) {
        best = len;
        ba = a;
        bb = b;
      }
    }
  RatVec mid(v[ba].size());
  for (std::size_t k = 0; k < mid.size(); ++k) mid[k] = (v[ba][k] + v[bb][k]) / 2;
  Simplex s1 = s, s2 = s;
  s1.vertices[ba] = mid;
  s2.vertices[bb] = mid;
  return {s1, s2};
}

/// Positive / NotPositive / Indeterminate for a polynomial on a polytope.
inline Positivity polynomial_positivity(const Polynomial& f, const DelzantPolytope& p, int depth) {
  for (const auto& v : p.vertices())
    if (f.eval(v) <= 0) return Positivity::NotPositive;
  std::vector<std::pair<Simplex, int>> stack;
  for (auto& s : triangulate(p)) stack.emplace_back(std::move(s), 0);
  while (!stack.empty()) {
    auto [s, level] = std::move(stack.back());
    stack.pop_back();
    if (bernstein_positive(f, s)) continue;
    for (const auto& v : s.vertices)
      if (f.eval(v) <= 0) return Positivity::NotPositive;
    if (level >= depth) return Positivity::Indeterminate;
    auto [a, b] = bisect_longest_edge(s);
    stack.emplace_back(std::move(a), level + 1);
    stack.emplace_back(std::move(b), level + 1);
  }
  return Positivity::Positive;
}

/// Uniform-ish samples of the polytope: random convex combinations of
/// triangulation vertices (deterministic seed).
inline std::vector<Vec> sample_points(const DelzantPolytope& p, int count, unsigned seed = 12345) {
  std::vector<Vec> pts;
  const auto tri = triangulate(p);
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  for (int i = 0; i < count; ++i) {
    const Simplex& s = tri[static_cast<std::size_t>(i) % tri.size()];
    std::vector<double> lam(s.vertices.size());
    double sum = 0;
    for (auto& l : lam) sum += (l = expo(rng));
    Vec x = Vec::Zero(p.dim());
    for (std::size_t k = 0; k < lam.size(); ++k) x += (lam[k] / sum) * to_vec(s.vertices[k]);
    pts.push_back(x);
  }
  return pts;
}

inline bool term_certified_positive(const WeightTerm& t, const DelzantPolytope& p, int depth) {
  if (t.scalar() <= 0) return false;
  for (const auto& f : t.powers()) {
    if (p.min_over(f.base) > 0) continue;
    const bool even = is_integer(f.exponent) && std::fmod(f.exponent, 2.0) == 0.0;
    if (even && p.max_over(f.base) < 0) continue;
    return false;
  }
  if (t.poly()) return polynomial_positivity(*t.poly(), p, depth) == Positivity::Positive;
  return true;
}

}  // namespace detail

inline Positivity WeightFn::positivity_on(const DelzantPolytope& p, int bernstein_depth, int samples) const {
  if (terms_.empty()) return Positivity::NotPositive;
  if (is_polynomial()) return detail::polynomial_positivity(as_polynomial(), p, bernstein_depth);
  if (std::all_of(terms_.begin(), terms_.end(), [&](const WeightTerm& t) { return detail::term_certified_positive(t, p, bernstein_depth); }))
    return Positivity::Positive;
  try {
    for (const auto& v : p.vertices())
      if (!(eval(to_vec(v)) > 0)) return Positivity::NotPositive;
    for (const auto& x : detail::sample_points(p, samples))
      if (!(eval(x) > 0)) return Positivity::NotPositive;
  } catch (const Error&) {
    return Positivity::NotPositive;
  }
  return Positivity::Indeterminate;
}

inline void require_positive(const WeightFn& w, const DelzantPolytope& p, const std::string& what) {
  const Positivity verdict = w.positivity_on(p);
  if (verdict == Positivity::Positive) return;
  throw Error(ErrorKind::NotPositive, what + (verdict == Positivity::NotPositive ? " is not positive on the polytope"
                                                                                : " could not be certified positive on the polytope"));
}

/// A pair of weights (v, w) for the (v, w)-cscK equation.
struct WeightPair {
  WeightFn v;
  WeightFn w;
};

/// (v, 2(m + <d log v, x>) v) = (v, 2 m v + 2 x.grad v): the weights under
/// which v-solitons of a Fano manifold are (v, w)-cscK.
inline WeightPair soliton_weight_pair(const DelzantPolytope& p, const WeightFn& v, int m) {
  require_positive(v, p, "soliton weight v");
  return {v, v * (2.0 * m) + v.euler() * 2.0};
}

namespace detail {

inline AffineFunction reeb_affine(const DelzantPolytope& p, const RatVec& xi, const Rational& a) {
  if (static_cast<int>(xi.size()) != p.dim()) throw Error(ErrorKind::InvalidInput, "xi has the wrong dimension");
  AffineFunction l(xi, a);
  const Rational m = p.min_over(l);
  if (m <= 0) throw Error(ErrorKind::NotPositive, "l = " + l.to_string() + " has minimum " + to_string(m) + " <= 0 on the polytope");
  return l;
}

}  // namespace detail

/// (l^{-(m+1)}, 2 m a l^{-(m+2)}) with l = <xi, x> + a: Sasaki weights of
/// the cone over the anticanonical bundle.
inline WeightPair sasaki_weight_pair(const DelzantPolytope& p, const RatVec& xi, const Rational& a, int m) {
  const AffineFunction l = detail::reeb_affine(p, xi, a);
  return {WeightFn::affine_power(l, -(m + 1.0)), WeightFn::affine_power(l, -(m + 2.0), 2.0 * m * to_double(a))};
}

/// (l^{-(m+2)}, 2(-2 l + (m+2) a) l^{-(m+3)}): the soliton realization of
/// the same l^{-(m+2)}-soliton.
inline WeightPair equivalent_sasaki_pair(const DelzantPolytope& p, const RatVec& xi, const Rational& a, int m) {
  const AffineFunction l = detail::reeb_affine(p, xi, a);
  WeightFn w = WeightFn::affine_power(l, -(m + 2.0), -4.0) + WeightFn::affine_power(l, -(m + 3.0), 2.0 * (m + 2.0) * to_double(a));
  return {WeightFn::affine_power(l, -(m + 2.0)), w};
}

}  // namespace wkstab
