#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

#include "wkstab/rational.hpp"

namespace wkstab {

/// Largest torus rank supported by the numeric paths. Point vectors are
/// stack-allocated up to this size.
inline constexpr int kMaxDim = 6;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

inline Vec to_vec(const RatVec& v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = to_double(v[i]);
  return out;
}

inline RatVec exact_rational(const Vec& v) {
  RatVec out(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = exact_rational(v[i]);
  return out;
}

/// Affine map y -> origin + linear * y from R^s into R^r. Used to embed
/// facets and to translate polytopes.
struct AffineMap {
  RatVec origin;      // length r
  RatMatrix linear;   // r rows, s columns

  int source_dim() const { return linear.empty() ? 0 : static_cast<int>(linear[0].size()); }
  int target_dim() const { return static_cast<int>(origin.size()); }

  RatVec apply(const RatVec& y) const {
    RatVec x = origin;
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t k = 0; k < y.size(); ++k) x[i] += linear[i][k] * y[k];
    return x;
  }

  static AffineMap translation(const RatVec& t) {
    const std::size_t r = t.size();
    AffineMap m;
    m.origin = t;
    m.linear.assign(r, RatVec(r, Rational(0)));
    for (std::size_t i = 0; i < r; ++i) m.linear[i][i] = 1;
    return m;
  }
};

/// l(x) = <zeta, x> + a with exact rational data.
class AffineFunction {
 public:
  AffineFunction() = default;
  AffineFunction(RatVec zeta, Rational a) : zeta_(std::move(zeta)), a_(std::move(a)) { cache(); }

  static AffineFunction constant(int dim, const Rational& a) { return {RatVec(static_cast<std::size_t>(dim), Rational(0)), a}; }
  static AffineFunction coordinate(int dim, int i) {
    RatVec z(static_cast<std::size_t>(dim), Rational(0));
    z[static_cast<std::size_t>(i)] = 1;
    return {z, Rational(0)};
  }

  int dim() const { return static_cast<int>(zeta_.size()); }
  const RatVec& zeta() const { return zeta_; }
  const Rational& a() const { return a_; }
  const Vec& zeta_d() const { return zeta_d_; }
  double a_d() const { return a_d_; }

  Rational eval(const RatVec& x) const { return dot(zeta_, x) + a_; }
  double eval(const Vec& x) const { return zeta_d_.dot(x) + a_d_; }

  bool is_constant() const {
    for (const auto& z : zeta_)
      if (z != 0) return false;
    return true;
  }

  AffineFunction pullback(const AffineMap& m) const {
    const int s = m.source_dim();
    RatVec z(static_cast<std::size_t>(s), Rational(0));
    for (int k = 0; k < s; ++k)
      for (std::size_t i = 0; i < zeta_.size(); ++i) z[static_cast<std::size_t>(k)] += zeta_[i] * m.linear[i][static_cast<std::size_t>(k)];
    return {z, eval(m.origin)};
  }

  AffineFunction operator+(const AffineFunction& o) const {
    RatVec z = zeta_;
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += o.zeta_[i];
    return {z, a_ + o.a_};
  }
  AffineFunction scaled(const Rational& c) const {
    RatVec z = zeta_;
    for (auto& zi : z) zi *= c;
    return {z, a_ * c};
  }

  bool operator==(const AffineFunction& o) const { return zeta_ == o.zeta_ && a_ == o.a_; }
  bool operator<(const AffineFunction& o) const {
    if (zeta_ != o.zeta_) return zeta_ < o.zeta_;
    return a_ < o.a_;
  }

  std::string to_string() const {
    std::string s = "<(";
    for (std::size_t i = 0; i < zeta_.size(); ++i) s += (i ? "," : "") + wkstab::to_string(zeta_[i]);
    return s + "),x> + " + wkstab::to_string(a_);
  }

 private:
  void cache() {
    zeta_d_ = to_vec(zeta_);
    a_d_ = to_double(a_);
  }

  RatVec zeta_;
  Rational a_ = 0;
  Vec zeta_d_;
  double a_d_ = 0.0;
};

}  // namespace wkstab
