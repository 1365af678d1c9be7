#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "wkstab/quadrature.hpp"
#include "wkstab/weights.hpp"

namespace {

using namespace wkstab;

Vec v1(double x) {
  Vec v(1);
  v << x;
  return v;
}

AffineFunction aff(std::initializer_list<Rational> zeta, Rational a) { return AffineFunction(RatVec(zeta), a); }

// A random weight built from every grammar ingredient, finite and positive
// on the canonical polytope of dimension r.
WeightFn random_weight(int r, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> small(-3, 3);
  std::uniform_real_distribution<double> pw(-3.5, 3.5);
  auto random_affine = [&](Rational a) {
    RatVec z(static_cast<std::size_t>(r));
    for (auto& zi : z) zi = Rational(small(rng), 8);
    return AffineFunction(z, a);
  };
  WeightTerm t(r, 0.5 + (rng() % 100) / 50.0);
  t.multiply_power(random_affine(2), pw(rng));
  t.multiply_power(random_affine(3), std::round(pw(rng)));
  t.multiply_exp(random_affine(0));
  Polynomial p = Polynomial::constant(r, 3);
  for (int i = 0; i < r; ++i) p += Polynomial::variable(r, i) * Rational(small(rng), 5) + Polynomial::variable(r, i).pow(2) * Rational(1, 7);
  t.multiply_poly(p);
  WeightTerm u(r, 0.25);
  u.multiply_power(random_affine(4), pw(rng));
  return WeightFn(r, {t, u});
}

TEST(Weights, EvalAndGradExamples) {
  WeightFn w = WeightFn::exp_affine(aff({1}, 0)) * parse_polynomial("x+2", 1);
  EXPECT_DOUBLE_EQ(w.eval(v1(0)), 2.0);
  WeightFn n = WeightFn::affine_power(aff({1}, 2), -3);
  EXPECT_DOUBLE_EQ(n.grad(v1(0))[0], -3.0 / 16.0);
  WeightFn e = WeightFn::exp_affine(aff({Rational(3, 10), Rational(-7, 4)}, 0));
  Vec g = e.grad(Vec::Zero(2));
  EXPECT_DOUBLE_EQ(g[0], 0.3);
  EXPECT_DOUBLE_EQ(g[1], -1.75);
}

TEST(Weights, DomainViolation) {
  EXPECT_THROW_KIND(WeightFn::affine_power(aff({1}, 0), -1).eval(v1(0)), ErrorKind::DomainViolation);
  EXPECT_THROW_KIND(WeightFn::affine_power(aff({1}, 0), 0.5).eval(v1(-1)), ErrorKind::DomainViolation);
  EXPECT_DOUBLE_EQ(WeightFn::affine_power(aff({1}, 0), 3).eval(v1(-2)), -8.0);
}

TEST(Weights, GradientAndHessianMatchFiniteDifferences) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  int points = 0;
  for (int r = 1; r <= 3; ++r)
    for (int inst = 0; inst < 5; ++inst) {
      WeightFn w = random_weight(r, rng);
      for (int k = 0; k < 7; ++k, ++points) {
        Vec x(r);
        for (int i = 0; i < r; ++i) x[i] = u(rng) / r;
        const Jet j = w.jet(x);
        EXPECT_NEAR(j.value, w.eval(x), 1e-14 * std::abs(j.value));
        const double h = 1e-5;
        for (int i = 0; i < r; ++i) {
          Vec xp = x, xm = x;
          xp[i] += h;
          xm[i] -= h;
          const double fd = (w.eval(xp) - w.eval(xm)) / (2 * h);
          EXPECT_NEAR(j.grad[i], fd, 1e-6 * std::max(1.0, std::abs(fd)));
          const Vec gd = (w.grad(xp) - w.grad(xm)) / (2 * h);
          for (int l = 0; l < r; ++l) EXPECT_NEAR(j.hess(l, i), gd[l], 1e-6 * std::max(1.0, std::abs(gd[l])));
        }
      }
    }
  EXPECT_GE(points, 100);
}

TEST(Weights, EulerOperatorMatchesGradient) {
  std::mt19937_64 rng(2);
  for (int r = 1; r <= 3; ++r) {
    WeightFn w = random_weight(r, rng);
    WeightFn e = w.euler();
    for (int k = 0; k < 10; ++k) {
      Vec x = Vec::Random(r) * 0.3;
      EXPECT_NEAR(e.eval(x), x.dot(w.grad(x)), 1e-12 * std::max(1.0, std::abs(e.eval(x))));
    }
  }
}

TEST(Weights, PolynomialExpansionIsExact) {
  WeightTerm t(2, 0.5);
  t.multiply_power(aff({1, 2}, 3), 2);
  t.multiply_power(aff({-1, 1}, 1), 1);
  t.multiply_poly(parse_polynomial("x*y + 1", 2));
  ASSERT_TRUE(t.is_polynomial());
  Polynomial expected = parse_polynomial("(x + 2*y + 3)^2 * (-x + y + 1) * (x*y + 1) / 2", 2);
  EXPECT_EQ(t.as_polynomial(), expected);
}

TEST(Weights, MergesIdenticalAffineFactors) {
  WeightTerm t(1);
  t.multiply_power(aff({1}, 2), 3);
  t.multiply_power(aff({1}, 2), -1.5);
  ASSERT_EQ(t.powers().size(), 1u);
  EXPECT_DOUBLE_EQ(t.powers()[0].exponent, 1.5);
  t.multiply_power(aff({1}, 2), -1.5);
  EXPECT_TRUE(t.powers().empty());
}

TEST(Weights, SolitonPairExamples) {
  auto I = presets::interval();
  for (int m : {1, 2, 3}) {
    auto pair = soliton_weight_pair(I, WeightFn::constant(1, 1), m);
    for (double x : {-1.0, -0.2, 0.7}) EXPECT_DOUBLE_EQ(pair.w.eval(v1(x)), 2.0 * m);
  }
  const double xi = 0.37;
  auto pe = soliton_weight_pair(I, WeightFn::exp_affine(aff({exact_rational(xi)}, 0)), 1);
  for (double x : {-1.0, 0.1, 0.9}) EXPECT_NEAR(pe.w.eval(v1(x)), 2 * (1 + xi * x) * std::exp(xi * x), 1e-14);
  auto pn = soliton_weight_pair(I, WeightFn::affine_power(aff({1}, 2), -4), 1);
  for (double x : {-1.0, -0.3, 0.5, 1.0})
    EXPECT_NEAR(pn.w.eval(v1(x)), 2 * (1 - 4 * x / (x + 2)) * std::pow(x + 2, -4), 1e-15);
  EXPECT_THROW_KIND(soliton_weight_pair(I, WeightFn::polynomial(parse_polynomial("x", 1)), 1), ErrorKind::NotPositive);
}

TEST(Weights, SolitonNormalizationIdentity) {
  // int w = 2m int v + 2 int <grad v, x>, by quadrature on both sides.
  std::mt19937_64 rng(41);
  for (const auto& p : {presets::interval(), presets::projective_plane(), presets::hexagon()}) {
    WeightFn v = random_weight(p.dim(), rng);
    ASSERT_EQ(v.positivity_on(p), Positivity::Positive);
    const int m = p.dim();
    auto pair = soliton_weight_pair(p, v, m);
    const double lhs = integrate_weighted(p, pair.w).value;
    const double iv = integrate_weighted(p, v).value;
    const double ig = integrate_scalar(p, [&](const Vec& x) { return x.dot(v.grad(x)); }).value;
    EXPECT_NEAR(lhs, 2 * m * iv + 2 * ig, 1e-10 * std::abs(lhs));
  }
}

TEST(Weights, SasakiPairs) {
  auto I = presets::interval();
  auto trivial = sasaki_weight_pair(I, {Rational(0)}, 1, 1);
  EXPECT_DOUBLE_EQ(trivial.v.eval(v1(0.4)), 1.0);
  EXPECT_DOUBLE_EQ(trivial.w.eval(v1(0.4)), 2.0);
  auto half = sasaki_weight_pair(I, {Rational(1, 2)}, 1, 1);
  for (double x : {-1.0, 0.0, 0.6}) {
    EXPECT_NEAR(half.v.eval(v1(x)), std::pow(x / 2 + 1, -2), 1e-15);
    EXPECT_NEAR(half.w.eval(v1(x)), 2 * std::pow(x / 2 + 1, -3), 1e-15);
  }
  EXPECT_THROW_KIND(sasaki_weight_pair(I, {Rational(2)}, 1, 1), ErrorKind::NotPositive);
  auto eq = equivalent_sasaki_pair(I, {Rational(1, 3)}, 1, 2);
  for (double x : {-1.0, 0.25}) {
    const double l = x / 3 + 1;
    EXPECT_NEAR(eq.v.eval(v1(x)), std::pow(l, -4), 1e-15);
    EXPECT_NEAR(eq.w.eval(v1(x)), 2 * (-2 * l + 4) * std::pow(l, -5), 1e-14);
  }
  EXPECT_THROW_KIND(equivalent_sasaki_pair(I, {Rational(-1)}, 1, 1), ErrorKind::NotPositive);
}

TEST(Weights, PositivityVerdicts) {
  auto I = presets::interval();
  EXPECT_EQ(WeightFn::polynomial(parse_polynomial("x+2", 1)).positivity_on(I), Positivity::Positive);
  EXPECT_EQ(WeightFn::polynomial(parse_polynomial("x+1", 1)).positivity_on(I), Positivity::NotPositive);
  EXPECT_EQ(WeightFn::polynomial(parse_polynomial("x^2 - x + 3/10", 1)).positivity_on(I), Positivity::Positive);
  EXPECT_EQ(WeightFn::polynomial(parse_polynomial("x^2 - 1/100", 1)).positivity_on(I), Positivity::NotPositive);
  // Tight minimum at 1/3, never a dyadic subdivision point.
  WeightFn tight = WeightFn::polynomial(parse_polynomial("(x - 1/3)^2 + 1/1000000000000", 1));
  EXPECT_EQ(tight.positivity_on(I, 4), Positivity::Indeterminate);
  EXPECT_THROW_KIND(require_positive(WeightFn(1, {[] {
                                       WeightTerm t(1);
                                       t.multiply_poly(parse_polynomial("(x - 1/3)^2 + 1/1000000000000", 1));
                                       t.multiply_exp(AffineFunction({Rational(1)}, 0));
                                       return t;
                                     }()}),
                                     I, "v"),
                    ErrorKind::NotPositive);
  EXPECT_EQ((WeightFn::exp_affine(aff({1}, 0)) - WeightFn::constant(1, 3)).positivity_on(I), Positivity::NotPositive);
  EXPECT_EQ(WeightFn::affine_power(aff({-1}, -3), 2).positivity_on(I), Positivity::Positive);
}

TEST(Weights, PositiveVerdictsAreSound) {
  std::mt19937_64 rng(77);
  int checked = 0;
  for (const auto& p : {presets::interval(), presets::projective_plane(), presets::hirzebruch1()}) {
    for (int inst = 0; inst < 3; ++inst) {
      WeightFn w = random_weight(p.dim(), rng);
      if (w.positivity_on(p) != Positivity::Positive) continue;
      for (const auto& x : detail::sample_points(p, 100000, 1000 + inst)) ASSERT_GT(w.eval(x), 0.0);
      ++checked;
    }
  }
  EXPECT_GE(checked, 5);
}

TEST(Weights, PullbackCommutesWithEvaluation) {
  std::mt19937_64 rng(5);
  WeightFn w = random_weight(2, rng);
  AffineMap m;
  m.origin = {Rational(1, 10), Rational(-1, 5)};
  m.linear = {{Rational(1), Rational(2)}, {Rational(0), Rational(1)}};
  WeightFn g = w.pullback(m);
  for (int k = 0; k < 5; ++k) {
    Vec y = Vec::Random(2) * 0.1;
    RatVec yr = exact_rational(y);
    Vec x = to_vec(m.apply(yr));
    EXPECT_NEAR(g.eval(y), w.eval(x), 1e-13 * std::abs(w.eval(x)));
  }
}

}  // namespace
