#pragma once

// Exact rational arithmetic helpers. Every piece of polytope combinatorics
// (vertices, incidences, volumes, polynomial integrals) runs on these.

#include <boost/multiprecision/gmp.hpp>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wkstab/error.hpp"

namespace wkstab {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;
using RatVec = std::vector<Rational>;
using RatMatrix = std::vector<RatVec>;  // row-major
using IntVec = std::vector<std::int64_t>;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// Exact conversion: every finite double is a dyadic rational.
inline Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw Error(ErrorKind::InvalidInput, "non-finite value cannot be made rational");
  return Rational(x);
}

inline std::string to_string(const Rational& q) {
  if (boost::multiprecision::denominator(q) == 1) return boost::multiprecision::numerator(q).str();
  return q.str();
}

inline std::string to_string(const RatVec& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + to_string(v[i]);
  return s + ")";
}

/// Parses "p/q", "-7", "0.125", "1e-3", "2.5e2". Decimal forms are read
/// exactly (0.1 is 1/10, not the nearest double).
inline Rational parse_rational(std::string_view text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw Error(ErrorKind::Parse, "empty rational literal");

  auto fail = [&]() -> Rational { throw Error(ErrorKind::Parse, "malformed rational literal '" + std::string(text) + "'"); };

  if (auto slash = s.find('/'); slash != std::string::npos) {
    Rational num = parse_rational(s.substr(0, slash));
    Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) throw Error(ErrorKind::Parse, "zero denominator in '" + std::string(text) + "'");
    return num / den;
  }

  std::size_t pos = 0;
  bool negative = false;
  if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
  BigInt digits = 0;
  int frac_digits = 0;
  bool any_digit = false;
  bool in_frac = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits = digits * 10 + (c - '0');
      any_digit = true;
      if (in_frac) ++frac_digits;
    } else if (c == '.' && !in_frac) {
      in_frac = true;
    } else {
      break;
    }
  }
  if (!any_digit) return fail();
  long exponent = 0;
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') return fail();
    ++pos;
    std::size_t consumed = 0;
    try {
      exponent = std::stol(s.substr(pos), &consumed);
    } catch (const std::exception&) {
      return fail();
    }
    if (pos + consumed != s.size()) return fail();
  }
  exponent -= frac_digits;
  Rational value(digits);
  BigInt scale = 1;
  for (long i = 0; i < std::labs(exponent); ++i) scale *= 10;
  if (exponent >= 0)
    value *= Rational(scale);
  else
    value /= Rational(scale);
  return negative ? Rational(-value) : value;
}

inline Rational dot(const RatVec& a, const RatVec& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Rational dot(const IntVec& a, const RatVec& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += Rational(a[i]) * b[i];
  return s;
}

inline std::vector<double> to_double(const RatVec& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = to_double(v[i]);
  return out;
}

/// Determinant by fraction-free-enough Gaussian elimination over Q.
inline Rational determinant(RatMatrix a) {
  const std::size_t n = a.size();
  Rational det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col] == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      det = -det;
    }
    det *= a[col][col];
    for (std::size_t row = col + 1; row < n; ++row) {
      if (a[row][col] == 0) continue;
      Rational factor = a[row][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[row][k] -= factor * a[col][k];
    }
  }
  return det;
}

/// Solves a square system exactly; nullopt when singular.
inline std::optional<RatVec> solve_exact(RatMatrix a, RatVec b) {
  const std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col] == 0) ++pivot;
    if (pivot == n) return std::nullopt;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t row = 0; row < n; ++row) {
      if (row == col || a[row][col] == 0) continue;
      Rational factor = a[row][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[row][k] -= factor * a[col][k];
      b[row] -= factor * b[col];
    }
  }
  RatVec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

/// Rank of a rational matrix (rows need not be square).
inline int rank(RatMatrix a) {
  if (a.empty()) return 0;
  const std::size_t rows = a.size(), cols = a[0].size();
  int r = 0;
  for (std::size_t col = 0; col < cols && r < static_cast<int>(rows); ++col) {
    std::size_t pivot = r;
    while (pivot < rows && a[pivot][col] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(a[pivot], a[r]);
    for (std::size_t row = r + 1; row < rows; ++row) {
      if (a[row][col] == 0) continue;
      Rational factor = a[row][col] / a[r][col];
      for (std::size_t k = col; k < cols; ++k) a[row][k] -= factor * a[r][k];
    }
    ++r;
  }
  return r;
}

inline std::int64_t gcd_of(const IntVec& v) {
  std::int64_t g = 0;
  for (auto x : v) g = std::gcd(g, x < 0 ? -x : x);
  return g;
}

inline Rational factorial(int n) {
  Rational f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace wkstab
