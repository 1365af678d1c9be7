#pragma once

// Closed-form one-dimensional oracles on [-1, 1], independent of the
// library's quadrature.

#include <cmath>
#include <functional>

namespace wkstab::oracles {

/// Root of a continuous function with a sign change on [a, b].
inline double bisect(const std::function<double(double)>& g, double a, double b, double tol = 1e-15) {
  double ga = g(a);
  for (int it = 0; it < 200 && b - a > tol; ++it) {
    const double m = 0.5 * (a + b);
    const double gm = g(m);
    if ((gm > 0) == (ga > 0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

/// int_{-1}^{1} x e^{xi x} (x + 2) dx by antiderivatives.
inline double soliton_moment(double xi) {
  auto f1 = [&](double x) { return std::exp(xi * x) * (x / xi - 1 / (xi * xi)); };
  auto f2 = [&](double x) { return std::exp(xi * x) * (x * x / xi - 2 * x / (xi * xi) + 2 / (xi * xi * xi)); };
  return (f2(1) - f2(-1)) + 2 * (f1(1) - f1(-1));
}

/// int_{-1}^{1} x (xi x + 1)^{-4} (x + 2) dx via u = xi x + 1:
/// [u^-2 + (2 xi - 2) u^-3 + (1 - 2 xi) u^-4] / xi^3 du.
inline double reeb_moment(double xi) {
  auto F = [&](double u) { return -1 / u - (2 * xi - 2) / (2 * u * u) - (1 - 2 * xi) / (3 * u * u * u); };
  return (F(1 + xi) - F(1 - xi)) / (xi * xi * xi);
}

inline double soliton_root() { return bisect(soliton_moment, -0.999, -1e-3); }
inline double reeb_root() { return bisect(reeb_moment, 1e-3, 0.999); }

}  // namespace wkstab::oracles
