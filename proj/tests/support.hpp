#pragma once

// Shared fixtures for the unit tests: random Delzant polytopes obtained
// from the presets by unimodular maps, translations and dilations, and
// random rational polynomials.

#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "wkstab/polynomial.hpp"
#include "wkstab/polytope.hpp"

#define EXPECT_THROW_KIND(stmt, expected_kind)                                        \
  do {                                                                              \
    bool caught_ = false;                                                           \
    try {                                                                           \
      stmt;                                                                         \
    } catch (const ::wkstab::Error& e_) {                                           \
      caught_ = true;                                                               \
      EXPECT_EQ(::wkstab::to_string(e_.kind()), ::wkstab::to_string(expected_kind)) \
          << e_.what();                                                             \
    }                                                                               \
    EXPECT_TRUE(caught_) << "no wkstab::Error thrown by " #stmt;                    \
  } while (0)

namespace wkstab::fixtures {

inline std::vector<DelzantPolytope> presets_of_dim(int r) {
  switch (r) {
    case 1: return {presets::interval()};
    case 2: return {presets::projective_plane(), presets::square(), presets::hirzebruch1(), presets::hexagon()};
    default: return {presets::projective_space3(), presets::cube()};
  }
}

/// Random matrix in SL(r, Z) as a product of elementary shears.
inline std::vector<IntVec> random_unimodular(int r, std::mt19937_64& rng) {
  std::vector<IntVec> a(static_cast<std::size_t>(r), IntVec(static_cast<std::size_t>(r), 0));
  for (int i = 0; i < r; ++i) a[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
  if (r == 1) {
    if (rng() % 2) a[0][0] = -1;
    return a;
  }
  std::uniform_int_distribution<int> idx(0, r - 1), amount(-2, 2);
  for (int step = 0; step < 4; ++step) {
    int i = idx(rng), j = idx(rng);
    if (i == j) continue;
    const int c = amount(rng);
    for (int k = 0; k < r; ++k) a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] += c * a[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
  }
  return a;
}

/// x -> scale * A x + t applied to a polytope given by half-spaces. The
/// normals transform by the inverse transpose; since A is unimodular we
/// can avoid the inverse by using normals u' with <u', A x> = <u, x>, i.e.
/// u' = A^{-T} u, computed exactly over Q.
inline DelzantPolytope transform(const DelzantPolytope& p, const std::vector<IntVec>& a, const Rational& scale, const RatVec& t) {
  const std::size_t r = static_cast<std::size_t>(p.dim());
  RatMatrix at(r, RatVec(r));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) at[i][j] = a[j][i];
  std::vector<HalfSpace> hs;
  for (const auto& h : p.halfspaces()) {
    RatVec u(r);
    for (std::size_t i = 0; i < r; ++i) u[i] = h.normal[i];
    auto un = solve_exact(at, u);
    IntVec n(r);
    for (std::size_t i = 0; i < r; ++i) n[i] = static_cast<std::int64_t>(boost::multiprecision::numerator((*un)[i]));
    // <u, x> + lam with x = (y - t) / scale: <n, y>/scale - <n, t>/scale + lam >= 0.
    Rational off = h.offset * scale - dot(n, t);
    hs.push_back({n, off});
  }
  return DelzantPolytope::from_halfspaces(hs);
}

inline DelzantPolytope random_delzant(int r, std::mt19937_64& rng) {
  auto pool = presets_of_dim(r);
  const DelzantPolytope& base = pool[rng() % pool.size()];
  std::uniform_int_distribution<int> num(1, 5), den(1, 4), shift(-6, 6);
  RatVec t(static_cast<std::size_t>(r));
  for (auto& ti : t) ti = Rational(shift(rng), den(rng));
  return transform(base, random_unimodular(r, rng), Rational(num(rng), den(rng)), t);
}

inline Polynomial random_polynomial(int r, int degree, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coef(-9, 9), den(1, 5), e(0, degree);
  Polynomial p(r);
  for (int term = 0; term < 2 + degree * 2; ++term) {
    Exponent ex(static_cast<std::size_t>(r), 0);
    int budget = degree;
    for (int i = 0; i < r; ++i) {
      std::uniform_int_distribution<int> pick(0, budget);
      ex[static_cast<std::size_t>(i)] = pick(rng);
      budget -= ex[static_cast<std::size_t>(i)];
    }
    p.add_term(ex, Rational(coef(rng), den(rng)));
  }
  (void)e;
  return p;
}

}  // namespace wkstab::fixtures
