#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "support.hpp"
#include "wkstab/invariants.hpp"
#include "wkstab/solvers.hpp"

namespace {

using namespace wkstab;

WeightFn poly(const std::string& s, int r) { return WeightFn::polynomial(parse_polynomial(s, r)); }

void expect_certificates(const SolverResult& res) {
  ASSERT_TRUE(res.converged);
  ASSERT_FALSE(res.trace.empty());
  for (std::size_t k = 0; k < res.trace.size(); ++k) {
    EXPECT_GT(res.trace[k].hessian_min_eigenvalue, 0) << "iterate " << k;
    EXPECT_GT(res.trace[k].min_vertex_value, 0) << "iterate " << k;
    if (k + 1 == res.trace.size()) continue;
    // Once the relative gradient is below ~1e-7 the Newton decrease is
    // under double resolution of the objective; require no increase there.
    const double f0 = res.trace[k].objective, f1 = res.trace[k + 1].objective;
    if (res.trace[k].grad_norm > 1e-7 * f0) {
      EXPECT_LT(f1, f0) << "iterate " << k;
    } else {
      EXPECT_LE(f1, f0 + 4 * std::numeric_limits<double>::epsilon() * f0) << "iterate " << k;
    }
  }
  EXPECT_LE(res.grad_norm, 1e-10 * res.objective);
}

TEST(Solvers, SolitonSymmetricInputs) {
  auto t0 = std::chrono::steady_clock::now();
  auto I = presets::interval();
  auto a = tian_zhu_soliton(I, WeightFn::constant(1, 1));
  EXPECT_LE(a.xi0.norm(), 1e-9);
  EXPECT_EQ(a.iterations, 0);
  EXPECT_NEAR(a.objective, 2.0, 1e-13);

  auto P2 = presets::projective_plane();
  EXPECT_LE(tian_zhu_soliton(P2, WeightFn::constant(2, 1)).xi0.norm(), 1e-9);

  // Centrally symmetric polytopes with even weights.
  auto sq = presets::square();
  auto hex = presets::hexagon();
  EXPECT_LE(tian_zhu_soliton(sq, poly("1+x1^2+x1*x2", 2)).xi0.norm(), 1e-9);
  EXPECT_LE(tian_zhu_soliton(hex, poly("3+x1^2-x2^2", 2)).xi0.norm(), 1e-9);
  EXPECT_LE(tian_zhu_soliton(presets::cube(), WeightFn::constant(3, 1)).xi0.norm(), 1e-9);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 1.0);
}

TEST(Solvers, SolitonOracle) {
  auto I = presets::interval();
  auto p = poly("x+2", 1);
  auto res = tian_zhu_soliton(I, p);
  expect_certificates(res);
  const double root = oracles::soliton_root();
  EXPECT_NEAR(res.xi0[0], root, 1e-8);
  EXPECT_GT(res.xi0[0], -1);
  EXPECT_LT(res.xi0[0], 0);

  // The Fano-weight Futaki invariant of e^{xi0 x} p vanishes there.
  auto v = WeightFn::exp_affine(AffineFunction(exact_rational(res.xi0), 0)) * p;
  EXPECT_LE(std::abs(futaki_fano(I, v, {Rational(1)}).value), 1e-9);
  // and is 2 grad F elsewhere
  auto v0 = p;
  EXPECT_NEAR(futaki_fano(I, v0, {Rational(1)}).value, 4.0 / 3.0, 1e-14);
}

TEST(Solvers, SolitonFutakiVanishesOnNonSymmetricPolytopes) {
  for (auto P : {presets::hirzebruch1(), presets::projective_plane()}) {
    auto p = P.dim() == 2 && P.num_facets() == 3 ? poly("x1+2", 2) : WeightFn::constant(2, 1);
    auto res = tian_zhu_soliton(P, p);
    expect_certificates(res);
    auto v = WeightFn::exp_affine(AffineFunction(exact_rational(res.xi0), 0)) * p;
    for (auto zeta : {RatVec{1, 0}, RatVec{0, 1}}) EXPECT_LE(std::abs(futaki_fano(P, v, zeta).value), 10 * 1e-10 * res.objective);
  }
  // Hirzebruch F1 carries a nontrivial soliton field.
  auto f1 = tian_zhu_soliton(presets::hirzebruch1(), WeightFn::constant(2, 1));
  EXPECT_GT(f1.xi0.norm(), 1e-3);
}

TEST(Solvers, ReebSymmetricInputs) {
  auto I = presets::interval();
  auto a = msy_reeb(I, WeightFn::constant(1, 1), 2);
  EXPECT_LE(a.xi0.norm(), 1e-9);
  auto P2 = presets::projective_plane();
  EXPECT_LE(msy_reeb(P2, WeightFn::constant(2, 1), 3).xi0.norm(), 1e-9);
  EXPECT_LE(msy_reeb(presets::hexagon(), poly("2+x1*x2", 2), 3).xi0.norm(), 1e-9);
}

TEST(Solvers, ReebOracle) {
  auto I = presets::interval();
  auto p = poly("x+2", 1);
  auto res = msy_reeb(I, p, 3);
  expect_certificates(res);
  EXPECT_NEAR(res.xi0[0], oracles::reeb_root(), 1e-8);

  // Weighted barycenter of l0^{-(s+1)} p vanishes.
  auto l0 = AffineFunction(exact_rational(res.xi0), 1);
  auto bary = integrate_weighted(I, WeightFn::affine_power(l0, -4) * p * parse_polynomial("x", 1));
  EXPECT_LE(std::abs(bary.value), 10 * 1e-10 * res.objective);
}

TEST(Solvers, ReebFeasibilityFromAggressiveStart) {
  // A start near the boundary of the feasible cone still converges and
  // every iterate stays strictly inside.
  auto I = presets::interval();
  SolverOptions o;
  o.initial = Vec::Constant(1, 0.9);
  auto res = msy_reeb(I, poly("x+2", 1), 3, o);
  expect_certificates(res);
  EXPECT_NEAR(res.xi0[0], oracles::reeb_root(), 1e-8);
  for (const auto& t : res.trace) EXPECT_GT(t.min_vertex_value, 0);
}

TEST(Solvers, EquivalentSasakiWeightsAtOptimum) {
  for (auto P : {presets::interval(), presets::projective_plane(), presets::hirzebruch1()}) {
    const int m = P.dim();
    auto res = msy_reeb(P, WeightFn::constant(m, 1), m + 1);
    auto pair = sasaki_weight_pair(P, exact_rational(res.xi0), Rational(1), m);
    for (const auto& rep : futaki_all_affine(P, pair.v, pair.w)) EXPECT_LE(std::abs(rep.value), 1e-6) << rep.direction.to_string();
  }
}

TEST(Solvers, Errors) {
  auto off = DelzantPolytope::from_halfspaces({{{1}, 0}, {{-1}, 2}});
  EXPECT_THROW_KIND(tian_zhu_soliton(off, WeightFn::constant(1, 1)), ErrorKind::OriginNotInterior);
  EXPECT_THROW_KIND(msy_reeb(off, WeightFn::constant(1, 1), 2), ErrorKind::OriginNotInterior);
  auto I = presets::interval();
  EXPECT_THROW_KIND(tian_zhu_soliton(I, poly("x", 1)), ErrorKind::NotPositive);
  EXPECT_THROW_KIND(msy_reeb(I, poly("x", 1), 2), ErrorKind::NotPositive);
  SolverOptions bad;
  bad.initial = Vec::Constant(1, 1.5);
  EXPECT_THROW_KIND(msy_reeb(I, WeightFn::constant(1, 1), 2, bad), ErrorKind::InfeasibleStart);
  SolverOptions one;
  one.max_iter = 1;
  EXPECT_THROW_KIND(tian_zhu_soliton(I, poly("x+2", 1), one), ErrorKind::MaxIterations);
}

}  // namespace
