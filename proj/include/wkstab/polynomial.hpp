#pragma once

// Multivariate polynomials with exact rational coefficients, a small
// expression parser, and a compiled double-precision evaluator.

#include <algorithm>
#include <cctype>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wkstab/affine.hpp"
#include "wkstab/error.hpp"
#include "wkstab/rational.hpp"

namespace wkstab {

using Exponent = std::vector<int>;

class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(int dim) : dim_(dim) {}

  static Polynomial constant(int dim, const Rational& c) {
    Polynomial p(dim);
    p.add_term(Exponent(static_cast<std::size_t>(dim), 0), c);
    return p;
  }
  static Polynomial variable(int dim, int i) {
    Polynomial p(dim);
    Exponent e(static_cast<std::size_t>(dim), 0);
    e[static_cast<std::size_t>(i)] = 1;
    p.add_term(e, 1);
    return p;
  }
  static Polynomial monomial(const Exponent& e, const Rational& c = 1) {
    Polynomial p(static_cast<int>(e.size()));
    p.add_term(e, c);
    return p;
  }
  static Polynomial from_affine(const AffineFunction& l) {
    Polynomial p = constant(l.dim(), l.a());
    for (int i = 0; i < l.dim(); ++i) p += variable(l.dim(), i) * l.zeta()[static_cast<std::size_t>(i)];
    return p;
  }

  int dim() const { return dim_; }
  const std::map<Exponent, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
    return d;
  }

  static int total_degree(const Exponent& e) {
    int s = 0;
    for (int k : e) s += k;
    return s;
  }

  void add_term(const Exponent& e, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Polynomial& operator+=(const Polynomial& o) {
    require_same_dim(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    require_same_dim(o);
    for (const auto& [e, c] : o.terms_) add_term(e, Rational(-c));
    return *this;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.require_same_dim(b);
    Polynomial out(a.dim_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        Exponent e(ea.size());
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        out.add_term(e, ca * cb);
      }
    return out;
  }
  friend Polynomial operator*(Polynomial a, const Rational& c) {
    if (c == 0) return Polynomial(a.dim_);
    for (auto& [e, coef] : a.terms_) coef *= c;
    return a;
  }
  Polynomial operator-() const { return *this * Rational(-1); }
  bool operator==(const Polynomial& o) const { return dim_ == o.dim_ && terms_ == o.terms_; }

  Polynomial pow(int k) const {
    Polynomial result = constant(dim_, 1);
    Polynomial base = *this;
    while (k > 0) {
      if (k & 1) result = result * base;
      k >>= 1;
      if (k) base = base * base;
    }
    return result;
  }

  Rational eval(const RatVec& x) const {
    Rational s = 0;
    for (const auto& [e, c] : terms_) {
      Rational t = c;
      for (std::size_t i = 0; i < e.size(); ++i)
        for (int k = 0; k < e[i]; ++k) t *= x[i];
      s += t;
    }
    return s;
  }

  Polynomial derivative(int i) const {
    Polynomial out(dim_);
    for (const auto& [e, c] : terms_) {
      const int k = e[static_cast<std::size_t>(i)];
      if (k == 0) continue;
      Exponent d = e;
      --d[static_cast<std::size_t>(i)];
      out.add_term(d, c * k);
    }
    return out;
  }

  /// x . grad(f), the Euler operator.
  Polynomial euler() const {
    Polynomial out(dim_);
    for (const auto& [e, c] : terms_) out.add_term(e, c * total_degree(e));
    return out;
  }

  /// f(origin + linear * y) as a polynomial in y.
  Polynomial compose(const AffineMap& m) const {
    const int s = m.source_dim();
    std::vector<Polynomial> images;
    images.reserve(static_cast<std::size_t>(dim_));
    for (int i = 0; i < dim_; ++i) {
      Polynomial xi = constant(s, m.origin[static_cast<std::size_t>(i)]);
      for (int k = 0; k < s; ++k) xi += variable(s, k) * m.linear[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
      images.push_back(std::move(xi));
    }
    // Power caches keep composition of dense polynomials affordable.
    std::vector<std::vector<Polynomial>> powers(static_cast<std::size_t>(dim_));
    Polynomial out(s);
    for (const auto& [e, c] : terms_) {
      Polynomial t = constant(s, c);
      for (int i = 0; i < dim_; ++i) {
        const int k = e[static_cast<std::size_t>(i)];
        if (k == 0) continue;
        auto& cache = powers[static_cast<std::size_t>(i)];
        if (cache.empty()) cache.push_back(constant(s, 1));
        while (static_cast<int>(cache.size()) <= k) cache.push_back(cache.back() * images[static_cast<std::size_t>(i)]);
        t = t * cache[static_cast<std::size_t>(k)];
      }
      out += t;
    }
    return out;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    bool first = true;
    // Highest degree first reads naturally.
    std::vector<std::pair<Exponent, Rational>> ordered(terms_.begin(), terms_.end());
    std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
      return total_degree(a.first) > total_degree(b.first);
    });
    for (const auto& [e, c] : ordered) {
      Rational mag = c < 0 ? Rational(-c) : c;
      if (first)
        s += c < 0 ? "-" : "";
      else
        s += c < 0 ? " - " : " + ";
      first = false;
      std::string mono;
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        if (!mono.empty()) mono += "*";
        mono += dim_ == 1 ? std::string("x") : "x" + std::to_string(i + 1);
        if (e[i] > 1) mono += "^" + std::to_string(e[i]);
      }
      if (mono.empty())
        s += wkstab::to_string(mag);
      else if (mag == 1)
        s += mono;
      else
        s += wkstab::to_string(mag) + "*" + mono;
    }
    return s;
  }

 private:
  void require_same_dim(const Polynomial& o) const {
    if (o.dim_ != dim_) throw Error(ErrorKind::InvalidInput, "polynomial dimension mismatch");
  }

  int dim_ = 0;
  std::map<Exponent, Rational> terms_;
};

/// Double-precision evaluator for a fixed polynomial. Derivatives are
/// compiled on demand from the exact polynomial.
class CompiledPolynomial {
 public:
  CompiledPolynomial() = default;
  explicit CompiledPolynomial(const Polynomial& p) : dim_(p.dim()) {
    for (const auto& [e, c] : p.terms()) {
      coeffs_.push_back(to_double(c));
      exps_.insert(exps_.end(), e.begin(), e.end());
      for (int k : e) max_pow_ = std::max(max_pow_, k);
    }
  }

  int dim() const { return dim_; }

  double eval(const Vec& x) const {
    if (coeffs_.empty()) return 0.0;
    double pw[kMaxDim][16];
    const bool table = max_pow_ < 16;
    if (table) {
      for (int i = 0; i < dim_; ++i) {
        pw[i][0] = 1.0;
        for (int k = 1; k <= max_pow_; ++k) pw[i][k] = pw[i][k - 1] * x[i];
      }
    }
    double s = 0.0;
    for (std::size_t t = 0; t < coeffs_.size(); ++t) {
      double v = coeffs_[t];
      const int* e = exps_.data() + t * static_cast<std::size_t>(dim_);
      for (int i = 0; i < dim_; ++i) v *= table ? pw[i][e[i]] : std::pow(x[i], e[i]);
      s += v;
    }
    return s;
  }

 private:
  int dim_ = 0;
  int max_pow_ = 0;
  std::vector<double> coeffs_;
  std::vector<int> exps_;
};

/// Value, gradient and Hessian evaluators for a polynomial.
class PolynomialJet {
 public:
  PolynomialJet() = default;
  explicit PolynomialJet(const Polynomial& p) : dim_(p.dim()), value_(p) {
    for (int i = 0; i < dim_; ++i) {
      Polynomial di = p.derivative(i);
      grad_.emplace_back(di);
      for (int j = 0; j < dim_; ++j) hess_.emplace_back(di.derivative(j));
    }
  }

  double eval(const Vec& x) const { return value_.eval(x); }
  Vec grad(const Vec& x) const {
    Vec g(dim_);
    for (int i = 0; i < dim_; ++i) g[i] = grad_[static_cast<std::size_t>(i)].eval(x);
    return g;
  }
  Mat hess(const Vec& x) const {
    Mat h(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) h(i, j) = hess_[static_cast<std::size_t>(i * dim_ + j)].eval(x);
    return h;
  }

 private:
  int dim_ = 0;
  CompiledPolynomial value_;
  std::vector<CompiledPolynomial> grad_;
  std::vector<CompiledPolynomial> hess_;
};

namespace detail {

class PolynomialParser {
 public:
  PolynomialParser(std::string_view text, int dim) : text_(text), dim_(dim) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::Parse, "polynomial '" + std::string(text_) + "' at offset " + std::to_string(pos_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  Polynomial expr() {
    Polynomial p = term();
    while (true) {
      if (peek('+')) {
        ++pos_;
        p += term();
      } else if (peek('-')) {
        ++pos_;
        p -= term();
      } else {
        return p;
      }
    }
  }

  Polynomial term() {
    Polynomial p = factor();
    while (true) {
      skip_ws();
      if (peek('*')) {
        ++pos_;
        p = p * factor();
      } else if (peek('/')) {
        ++pos_;
        Polynomial d = factor();
        if (d.degree() > 0 || d.is_zero()) fail("division only by nonzero constants");
        p = p * (Rational(1) / d.terms().begin()->second);
      } else if (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '(')) {
        p = p * factor();  // implicit product, e.g. "2x" or "3(x+1)"
      } else {
        return p;
      }
    }
  }

  Polynomial factor() {
    if (peek('-')) {
      ++pos_;
      return -factor();
    }
    if (peek('+')) {
      ++pos_;
      return factor();
    }
    Polynomial b = base();
    if (peek('^')) {
      ++pos_;
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected a nonnegative integer exponent");
      b = b.pow(std::stoi(std::string(text_.substr(start, pos_ - start))));
    }
    return b;
  }

  Polynomial base() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial p = expr();
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E') && pos_ + 1 < text_.size() &&
          (std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) || text_[pos_ + 1] == '-' || text_[pos_ + 1] == '+')) {
        ++pos_;
        if (text_[pos_] == '-' || text_[pos_] == '+') ++pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
      return Polynomial::constant(dim_, parse_rational(text_.substr(start, pos_ - start)));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
      return Polynomial::variable(dim_, variable_index(text_.substr(start, pos_ - start)));
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  int variable_index(std::string_view name) {
    static constexpr std::string_view letters = "xyzw";
    int idx = -1;
    if (name.size() == 1 && letters.find(name[0]) != std::string_view::npos) {
      idx = static_cast<int>(letters.find(name[0]));
    } else if (name.size() >= 2 && name[0] == 'x') {
      std::string_view digits = name.substr(name[1] == '_' ? 2 : 1);
      if (!digits.empty() && std::all_of(digits.begin(), digits.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
        idx = std::stoi(std::string(digits)) - 1;
    }
    if (idx < 0 || idx >= dim_) fail("unknown variable '" + std::string(name) + "' for dimension " + std::to_string(dim_));
    return idx;
  }

  std::string_view text_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses expressions such as "x+2", "(3-x)^2*(x+2)", "x1^2 - 1/2 x2".
/// Variables: x1..xr (x, y, z, w as shorthands for the first four).
inline Polynomial parse_polynomial(std::string_view text, int dim) {
  return detail::PolynomialParser(text, dim).parse();
}

}  // namespace wkstab
