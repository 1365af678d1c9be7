#pragma once

// Oracle cross-check suites behind `wkstab verify`. Each check compares a
// library result against something computed another way: closed forms,
// Monte Carlo, a second formula for the same quantity.

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "wkstab/invariants.hpp"
#include "wkstab/io.hpp"
#include "wkstab/quadrature.hpp"
#include "wkstab/toricmetrics.hpp"

namespace wkstab::verify {

struct Check {
  std::string suite;
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline io::json to_json(const Check& c) {
  return {{"suite", c.suite}, {"check", c.name}, {"residual", c.residual}, {"tolerance", c.tolerance}, {"pass", c.pass}};
}

namespace detail {

inline Check make(const std::string& suite, const std::string& name, double residual, double tol) {
  return {suite, name, residual, tol, residual <= tol};
}

inline Rational fact(int n) {
  BigInt f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return Rational(f);
}

/// Every exponent vector of length r with total degree <= d.
inline std::vector<Exponent> exponents(int r, int d) {
  std::vector<Exponent> out;
  Exponent e(static_cast<std::size_t>(r), 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == r) {
      out.push_back(e);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      e[static_cast<std::size_t>(i)] = k;
      rec(i + 1, left - k);
    }
  };
  rec(0, d);
  return out;
}

inline std::vector<DelzantPolytope> all_presets() {
  return {presets::interval(),  presets::projective_plane(),  presets::square(), presets::hirzebruch1(),
          presets::hexagon(),   presets::projective_space3(), presets::cube()};
}

inline Polynomial random_poly(int r, int degree, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coef(-9, 9), den(1, 7);
  Polynomial p(r);
  for (const auto& e : exponents(r, degree))
    if (rng() % 2) p.add_term(e, Rational(coef(rng), den(rng)));
  p.add_term(Exponent(static_cast<std::size_t>(r), 0), 1);
  return p;
}

/// Weight families used for Futaki cross-checks: constant, affine, exp-affine.
inline std::vector<std::pair<std::string, WeightFn>> families(int r) {
  if (r == 1)
    return {{"v=1", WeightFn::constant(1, 1)},
            {"v=x+2", WeightFn::polynomial(parse_polynomial("x+2", 1))},
            {"v=exp(-x/2)", WeightFn::exp_affine(AffineFunction({Rational(-1, 2)}, 0))}};
  return {{"v=1", WeightFn::constant(2, 1)},
          {"v=1+x1/3+x2/4", WeightFn::polynomial(parse_polynomial("1+x1/3+x2/4", 2))},
          {"v=exp(x1/2-x2/3)", WeightFn::exp_affine(AffineFunction({Rational(1, 2), Rational(-1, 3)}, 0))}};
}

}  // namespace detail

inline std::vector<Check> quadrature_suite() {
  const std::string s = "quadrature";
  std::vector<Check> out;
  std::mt19937_64 rng(2024);

  // x^alpha over conv(0, a_1 e_1, ..., a_r e_r) = prod a_i^{alpha_i + 1} alpha! / (|alpha| + r)!
  {
    int mismatches = 0, cases = 0;
    std::uniform_int_distribution<int> num(1, 7), den(1, 5);
    for (int r = 1; r <= 3; ++r)
      for (const auto& alpha : detail::exponents(r, 6)) {
        Simplex sx{{RatVec(static_cast<std::size_t>(r), Rational(0))}};
        RatVec a(static_cast<std::size_t>(r));
        for (int i = 0; i < r; ++i) {
          a[static_cast<std::size_t>(i)] = Rational(num(rng), den(rng));
          RatVec v(static_cast<std::size_t>(r), Rational(0));
          v[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)];
          sx.vertices.push_back(v);
        }
        Rational expect = 1;
        int total = 0;
        for (int i = 0; i < r; ++i) {
          const int ai = alpha[static_cast<std::size_t>(i)];
          for (int k = 0; k <= ai; ++k) expect *= a[static_cast<std::size_t>(i)];
          expect *= detail::fact(ai);
          total += ai;
        }
        expect /= detail::fact(total + r);
        if (integrate_monomial_simplex(sx, alpha) != expect) ++mismatches;
        ++cases;
      }
    out.push_back(detail::make(s, "monomial moments on " + std::to_string(cases) + " simplices (exact)", mismatches, 0));
  }

  // numeric cubature against exact rational integration
  {
    double worst = 0;
    const auto pool = detail::all_presets();
    QuadratureOptions q;
    q.force_numeric = true;
    for (int c = 0; c < 100; ++c) {
      const auto& p = pool[static_cast<std::size_t>(c) % pool.size()];
      const Polynomial f = detail::random_poly(p.dim(), 2 + c % 5, rng);
      const double exact = to_double(integrate_poly(p, f));
      const double num = integrate_weighted(p, WeightFn::polynomial(f), q).value;
      worst = std::max(worst, std::abs(num - exact) / std::max(1.0, std::abs(exact)));
    }
    out.push_back(detail::make(s, "numeric vs exact polynomial integrals (100 cases, relative)", worst, 1e-12));
  }

  // 1-D antiderivatives on [-1, 1]
  {
    const auto I = presets::interval();
    QuadratureOptions q;
    q.force_numeric = true;
    double worst = 0;
    for (double a : {-3.0, -0.5, 0.7, 2.5}) {
      const double num = integrate_weighted(I, WeightFn::exp_affine(AffineFunction({exact_rational(a)}, 0)), q).value;
      worst = std::max(worst, std::abs(num - 2 * std::sinh(a) / a) / (2 * std::sinh(a) / a));
    }
    out.push_back(detail::make(s, "exp(a x) on [-1, 1] vs 2 sinh(a)/a", worst, 1e-11));
    worst = 0;
    for (double p : {0.5, 2.0, 3.5}) {
      const double num = integrate_weighted(I, WeightFn::affine_power(AffineFunction({Rational(1)}, 2), -p), q).value;
      const double ref = (std::pow(3.0, 1 - p) - 1.0) / (1 - p);
      worst = std::max(worst, std::abs(num - ref) / ref);
    }
    out.push_back(detail::make(s, "(x + 2)^-p on [-1, 1] vs antiderivative", worst, 1e-11));
  }

  // Monte Carlo on P^2 for a non-polynomial weight
  {
    const auto P2 = presets::projective_plane();
    const WeightFn f = detail::families(2)[2].second * WeightFn::polynomial(parse_polynomial("1+x1/3+x2/4", 2));
    const double quad = integrate_weighted(P2, f).value;
    std::mt19937_64 mc(7);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    const int n = 400000;
    double sum = 0, sum2 = 0;
    for (int i = 0; i < n; ++i) {
      Vec x(2);
      x << u(mc), u(mc);
      const double y = (x[0] >= -1 && x[1] >= -1 && x[0] + x[1] <= 1) ? 9.0 * f.eval(x) : 0.0;
      sum += y;
      sum2 += y * y;
    }
    const double mean = sum / n, sigma = std::sqrt((sum2 / n - mean * mean) / n);
    out.push_back(detail::make(s, "P2 exp-affine weight vs Monte Carlo (5 sigma)", std::abs(quad - mean), 5 * sigma));
  }

  // int_bdry f dsigma = int (r f + <x, grad f>) dx on canonical Fano polytopes
  {
    int mismatches = 0;
    for (const auto& p : detail::all_presets()) {
      for (int c = 0; c < 4; ++c) {
        const Polynomial f = detail::random_poly(p.dim(), 1 + c, rng);
        const Rational lhs = integrate_boundary_poly(p, f);
        const Rational rhs = integrate_poly(p, f * Rational(p.dim()) + f.euler());
        if (lhs != rhs) ++mismatches;
      }
    }
    out.push_back(detail::make(s, "divergence identity on presets (exact)", mismatches, 0));
  }
  return out;
}

inline std::vector<Check> futaki_suite(const GridSpec& grid, Normalization norm) {
  const std::string s = "futaki";
  std::vector<Check> out;
  for (const auto& [pname, P] : std::vector<std::pair<std::string, DelzantPolytope>>{{"P1", presets::interval()}, {"P2", presets::projective_plane()}}) {
    const int r = P.dim();
    const auto u = SymplecticPotential::guillemin(P);
    const auto basis = affine_basis(r);
    for (const auto& [vname, v] : detail::families(r)) {
      const auto pair = soliton_weight_pair(P, v, r);
      const auto num = futaki_numeric_all(P, u, pair.v, pair.w, basis, grid);
      const double kappa = normalization_factor(norm, r);
      double d_fano = 0, d_num = 0;
      for (std::size_t k = 0; k < basis.size(); ++k) {
        const double b = futaki_boundary(P, pair.v, pair.w, basis[k], norm).value;
        d_num = std::max(d_num, std::abs(b - kappa * num[k].value));
        d_fano = std::max(d_fano, std::abs(b - futaki_fano(P, pair.v, basis[k].zeta(), norm).value));
      }
      out.push_back(detail::make(s, pname + " " + vname + ": boundary vs fano", d_fano, 1e-6 * kappa));
      out.push_back(detail::make(s, pname + " " + vname + ": boundary vs metric", d_num, 1e-3 * kappa));
    }
  }
  return out;
}

inline std::vector<Check> identity_suite(const GridSpec& grid) {
  const std::string s = "identity";
  std::vector<Check> out;
  std::mt19937_64 rng(99);
  double worst = 0;
  int points = 0;
  const std::vector<DelzantPolytope> pool{presets::interval(), presets::projective_plane(), presets::square(), presets::hirzebruch1(), presets::hexagon()};
  for (int inst = 0; inst < 20; ++inst) {
    const auto& P = pool[static_cast<std::size_t>(inst) % pool.size()];
    const auto u = admissible_bump(P, random_bump_polynomial(P, 3 + inst % 2, rng));
    const auto fam = detail::families(P.dim());
    const WeightFn v = fam[static_cast<std::size_t>(inst) % fam.size()].second;
    for (const auto& x : wkstab::detail::sample_points(P, 10, static_cast<unsigned>(inst))) {
      const double h = std::min(2e-5, 0.25 * u.min_facet_value(x));
      worst = std::max(worst, std::abs(scal_v_direct(u, v, x, h) - scal_v_divergence(u, v, x, h)));
      ++points;
    }
  }
  out.push_back(detail::make(s, "direct vs divergence Scal_v at " + std::to_string(points) + " points", worst, 1e-6));

  const auto I = presets::interval();
  const auto g = SymplecticPotential::guillemin(I);
  double dev = 0;
  for (int k = 0; k <= 1000; ++k) {
    Vec x(1);
    x << -0.998 + 1.996 * k / 1000.0;
    dev = std::max(dev, std::abs(scal(g, x, grid.h) - 2.0));
  }
  out.push_back(detail::make(s, "Guillemin Scal on P1 equals 2 (1001 points)", dev, 1e-8));

  const double total = futaki_numeric(I, g, WeightFn::constant(1, 1), WeightFn::constant(1, 0), AffineFunction::constant(1, 1), grid).value;
  out.push_back(detail::make(s, "int Scal over P1 equals 2 |boundary| = 4", std::abs(total - 2 * to_double(boundary_measure(I))), 1e-6));
  return out;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"quadrature", "futaki", "identity", "all"};
  return names;
}

inline std::vector<Check> run(const std::string& suite, const GridSpec& grid, Normalization norm) {
  std::vector<Check> out;
  auto add = [&](std::vector<Check> c) { out.insert(out.end(), c.begin(), c.end()); };
  if (suite == "quadrature" || suite == "all") add(quadrature_suite());
  if (suite == "futaki" || suite == "all") add(futaki_suite(grid, norm));
  if (suite == "identity" || suite == "all") add(identity_suite(grid));
  if (out.empty()) throw Error(ErrorKind::InvalidInput, "unknown verify suite '" + suite + "'");
  return out;
}

}  // namespace wkstab::verify
