#pragma once

// Semi-simple principal fibrations with toric fiber: admissibility, the
// induced weights p, q, w~ on the fiber polytope, the Fano condition and
// enumeration of Fano data over a fixed fiber.
//
// Each base factor a contributes L_a(x) = <p_a, x> + c_a, positive on the
// fiber polytope, and
//
//   p = prod_a L_a^{n_a},   q = sum_a s_a / L_a,   w~ = p (l^ext - q).

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "wkstab/affine.hpp"
#include "wkstab/error.hpp"
#include "wkstab/invariants.hpp"
#include "wkstab/polynomial.hpp"
#include "wkstab/polytope.hpp"
#include "wkstab/quadrature.hpp"
#include "wkstab/solvers.hpp"
#include "wkstab/weights.hpp"

namespace wkstab {

/// A compact cscK base of complex dimension n. Either a Fano constant k
/// (then s = 2 n k) or the scalar curvature s itself.
struct BaseFactor {
  int n = 1;
  std::optional<int> k;
  double s = 0.0;

  double scalar_curvature() const { return k ? 2.0 * n * *k : s; }
  bool is_fano() const { return k.has_value(); }
};

struct FibrationFactor {
  BaseFactor base;
  IntVec p;
  Rational c;

  AffineFunction affine() const {
    RatVec z(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) z[i] = p[i];
    return {z, c};
  }
};

struct FibrationSpec {
  DelzantPolytope fiber;
  std::vector<FibrationFactor> factors;

  int fiber_dim() const { return fiber.dim(); }
  int base_dim() const {
    int n = 0;
    for (const auto& f : factors) n += f.base.n;
    return n;
  }
};

struct FibrationWeights {
  WeightFn p;
  WeightFn q;
  WeightFn w_tilde;
  AffineFunction ell_ext;
  ExtremalFunction extremal;
};

inline void validate(const FibrationSpec& spec) {
  const int r = spec.fiber.dim();
  for (std::size_t a = 0; a < spec.factors.size(); ++a) {
    const auto& f = spec.factors[a];
    const std::string tag = "factor " + std::to_string(a);
    if (static_cast<int>(f.p.size()) != r)
      throw Error(ErrorKind::InvalidInput, tag + ": p has " + std::to_string(f.p.size()) + " entries, fiber rank is " + std::to_string(r));
    if (f.base.n < 1) throw Error(ErrorKind::InvalidInput, tag + ": base dimension n must be >= 1");
    if (f.base.k && *f.base.k < 1) throw Error(ErrorKind::InvalidInput, tag + ": Fano constant k must be >= 1");
    const AffineFunction l = f.affine();
    for (std::size_t v = 0; v < spec.fiber.vertices().size(); ++v) {
      const Rational val = l.eval(spec.fiber.vertices()[v]);
      if (val <= 0)
        throw Error(ErrorKind::NotAdmissible, tag + ": <p, x> + c = " + to_string(val) + " at vertex " + to_string(spec.fiber.vertices()[v]) +
                                                  " (must be > 0)");
    }
  }
}

/// prod_a (<p_a, x> + c_a)^{n_a} as an exact polynomial.
inline Polynomial fibration_polynomial(const FibrationSpec& spec) {
  validate(spec);
  Polynomial p = Polynomial::constant(spec.fiber.dim(), 1);
  for (const auto& f : spec.factors) p = p * Polynomial::from_affine(f.affine()).pow(f.base.n);
  return p;
}

inline WeightFn fibration_weight(const FibrationSpec& spec) { return WeightFn::polynomial(fibration_polynomial(spec)); }

/// q = sum_a s_a / L_a.
inline WeightFn base_curvature_weight(const FibrationSpec& spec) {
  validate(spec);
  WeightFn q = WeightFn::constant(spec.fiber.dim(), 0.0);
  for (const auto& f : spec.factors) {
    const double s = f.base.scalar_curvature();
    if (s != 0.0) q = q + WeightFn::affine_power(f.affine(), -1.0, s);
  }
  return q;
}

/// l^ext from Fut_{p, p(l^ext - q)} = 0 on every affine direction.
inline FibrationWeights extremal_fibration_weights(const FibrationSpec& spec, const QuadratureOptions& opts = {}) {
  FibrationWeights out{fibration_weight(spec), base_curvature_weight(spec), WeightFn(spec.fiber.dim()), {}, {}};
  const bool has_q = std::any_of(spec.factors.begin(), spec.factors.end(), [](const FibrationFactor& f) { return f.base.scalar_curvature() != 0.0; });
  out.extremal = extremal_affine(spec.fiber, out.p, out.p, has_q ? std::optional<WeightFn>(out.q) : std::nullopt, opts);
  out.ell_ext = out.extremal.ell;
  out.w_tilde = out.p * Polynomial::from_affine(out.ell_ext);
  if (has_q) out.w_tilde = out.w_tilde - out.p * out.q;
  return out;
}

/// (p v, 2 p v (m + <d log v, x> + <d log p, x>)).
inline WeightPair soliton_fibration_weights(const FibrationSpec& spec, const WeightFn& v, int m) {
  const Polynomial pp = fibration_polynomial(spec);
  require_positive(v, spec.fiber, "v");
  const WeightFn pv = v * pp;
  WeightFn w = pv * (2.0 * m) + (v.euler() * pp) * 2.0;
  const Polynomial ep = pp.euler();
  if (!ep.is_zero()) w = w + (v * ep) * 2.0;
  return {pv, w};
}

/// A copy with every Fano factor's c replaced by k.
inline FibrationSpec with_fano_offsets(const FibrationSpec& spec) {
  FibrationSpec out = spec;
  for (std::size_t a = 0; a < out.factors.size(); ++a) {
    if (!out.factors[a].base.k) throw Error(ErrorKind::InvalidInput, "factor " + std::to_string(a) + " has no Fano constant k");
    out.factors[a].c = *out.factors[a].base.k;
  }
  return out;
}

/// <p_a, x> + k_a > 0 on the fiber for every factor.
inline bool fano_check(const FibrationSpec& spec) {
  if (!spec.fiber.is_canonical_fano()) throw Error(ErrorKind::NotCanonicalFano, "fiber polytope is not canonical Fano");
  try {
    validate(with_fano_offsets(spec));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NotAdmissible) return false;
    throw;
  }
  return true;
}

namespace detail {

/// Integer y with <y, v> + k > 0 at every vertex v. For a canonical Fano
/// polytope {<u_j, x> + 1 >= 0} the closed set {<y, v> >= -k} is
/// k conv(u_j), so its coordinate range is spanned by the k u_j.
inline std::vector<IntVec> fano_lattice_points(const DelzantPolytope& fiber, int k) {
  const int r = fiber.dim();
  IntVec lo(static_cast<std::size_t>(r)), hi(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) {
    std::int64_t a = 0, b = 0;
    for (const auto& h : fiber.halfspaces()) {
      a = std::min<std::int64_t>(a, k * h.normal[static_cast<std::size_t>(i)]);
      b = std::max<std::int64_t>(b, k * h.normal[static_cast<std::size_t>(i)]);
    }
    lo[static_cast<std::size_t>(i)] = a;
    hi[static_cast<std::size_t>(i)] = b;
  }
  std::vector<IntVec> out;
  IntVec y = lo;
  while (true) {
    bool ok = true;
    for (const auto& v : fiber.vertices())
      if (dot(y, v) + k <= 0) {
        ok = false;
        break;
      }
    if (ok) out.push_back(y);
    int i = 0;
    for (; i < r; ++i) {
      auto& yi = y[static_cast<std::size_t>(i)];
      if (yi < hi[static_cast<std::size_t>(i)]) {
        ++yi;
        break;
      }
      yi = lo[static_cast<std::size_t>(i)];
    }
    if (i == r) break;
  }
  return out;
}

}  // namespace detail

/// All tuples (p_1, ..., p_K) making the fibration Fano, in lexicographic
/// order of the factor-wise lists.
inline std::vector<std::vector<IntVec>> enumerate_fano(const DelzantPolytope& fiber, const std::vector<BaseFactor>& factors) {
  if (!fiber.is_canonical_fano()) throw Error(ErrorKind::NotCanonicalFano, "fiber polytope is not canonical Fano");
  std::vector<std::vector<IntVec>> per;
  for (std::size_t a = 0; a < factors.size(); ++a) {
    if (!factors[a].k || *factors[a].k < 1) throw Error(ErrorKind::InvalidInput, "factor " + std::to_string(a) + " needs a Fano constant k >= 1");
    per.push_back(detail::fano_lattice_points(fiber, *factors[a].k));
  }
  std::vector<std::vector<IntVec>> out{{}};
  for (const auto& choices : per) {
    std::vector<std::vector<IntVec>> next;
    for (const auto& prefix : out)
      for (const auto& y : choices) {
        auto t = prefix;
        t.push_back(y);
        next.push_back(std::move(t));
      }
    out = std::move(next);
  }
  return out;
}

/// int_Delta f p dx: the polytope image of fiber integration.
inline QuadratureResult fiber_integral(const FibrationSpec& spec, const WeightFn& f, const QuadratureOptions& opts = {}) {
  return integrate_weighted(spec.fiber, f * fibration_polynomial(spec), opts);
}

struct PipelineResult {
  SolverResult soliton;
  std::vector<FutakiReport> soliton_certificate;  // futaki_fano of e^{<xi0,x>} p v
  std::optional<SolverResult> reeb;
  std::vector<FutakiReport> reeb_certificate;  // Sasaki pair lifted to the total space
};

/// Sasaki weights of the total space (dimension N = m + n) pushed to the
/// fiber: (p l^{-(N+1)}, p (2 N l^{-(N+2)} - q l^{-(N+1)})).
inline WeightPair lifted_sasaki_pair(const FibrationSpec& spec, const RatVec& xi) {
  const int big_n = spec.fiber_dim() + spec.base_dim();
  const AffineFunction l = detail::reeb_affine(spec.fiber, xi, Rational(1));
  const Polynomial p = fibration_polynomial(spec);
  const WeightFn v = WeightFn::affine_power(l, -(big_n + 1.0)) * p;
  WeightFn w = WeightFn::affine_power(l, -(big_n + 2.0), 2.0 * big_n) * p;
  if (!spec.factors.empty()) w = w - v * base_curvature_weight(spec);
  return {v, w};
}

/// Soliton of the pv-weighted fiber with c_a = k_a and, optionally, the
/// Reeb optimum with s = m + n + 1.
inline PipelineResult pv_soliton_pipeline(const FibrationSpec& spec_in, const WeightFn& v, const SolverOptions& opts = {}, bool with_reeb = false) {
  const FibrationSpec spec = with_fano_offsets(spec_in);
  if (!fano_check(spec)) throw Error(ErrorKind::NotAdmissible, "Fano condition <p_a, x> + k_a > 0 fails on the fiber");
  const Polynomial p = fibration_polynomial(spec);
  const WeightFn pv = v * p;
  PipelineResult out{tian_zhu_soliton(spec.fiber, pv, opts), {}, std::nullopt, {}};
  const RatVec xi0 = exact_rational(out.soliton.xi0);
  const WeightFn vsol = WeightFn::exp_affine(AffineFunction(xi0, 0)) * pv;
  for (int i = 0; i < spec.fiber_dim(); ++i) {
    RatVec e(static_cast<std::size_t>(spec.fiber_dim()), Rational(0));
    e[static_cast<std::size_t>(i)] = 1;
    out.soliton_certificate.push_back(futaki_fano(spec.fiber, vsol, e));
  }
  if (with_reeb) {
    const double s = spec.fiber_dim() + spec.base_dim() + 1.0;
    out.reeb = msy_reeb(spec.fiber, WeightFn::polynomial(p), s, opts);
    const WeightPair pair = lifted_sasaki_pair(spec, exact_rational(out.reeb->xi0));
    out.reeb_certificate = futaki_all_affine(spec.fiber, pair.v, pair.w);
  }
  return out;
}

}  // namespace wkstab
