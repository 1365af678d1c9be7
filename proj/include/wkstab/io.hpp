#pragma once

// JSON input specs and report serialization.
//
// Rationals are written as integers when integral and as "p/q" strings
// otherwise; on input any of integer, "p/q", decimal string or JSON number
// is accepted. Parse errors carry the JSON pointer of the offending node.

#include <json.hpp>

#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "wkstab/error.hpp"
#include "wkstab/fibration.hpp"
#include "wkstab/invariants.hpp"
#include "wkstab/polynomial.hpp"
#include "wkstab/polytope.hpp"
#include "wkstab/solvers.hpp"
#include "wkstab/weights.hpp"

namespace wkstab::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1.0";
inline constexpr const char* kToolVersion = "0.1.0";

[[noreturn]] inline void fail(const std::string& path, const std::string& msg) { throw Error(ErrorKind::Parse, (path.empty() ? "/" : path) + ": " + msg); }

inline const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path, "missing required field '" + key + "'");
  return *it;
}

// ---- scalars ----

inline json to_json(const Rational& q) {
  if (boost::multiprecision::denominator(q) == 1) {
    const BigInt n = boost::multiprecision::numerator(q);
    if (n >= std::numeric_limits<std::int64_t>::min() && n <= std::numeric_limits<std::int64_t>::max()) return n.convert_to<std::int64_t>();
  }
  return to_string(q);
}

inline Rational rational_from_json(const json& j, const std::string& path) {
  try {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_number_float()) return exact_rational(j.get<double>());
    if (j.is_string()) return parse_rational(j.get<std::string>());
  } catch (const Error& e) {
    fail(path, e.what());
  }
  fail(path, "expected a rational (integer, \"p/q\" or number)");
}

inline double number_from_json(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return to_double(rational_from_json(j, path));
  fail(path, "expected a number");
}

inline int int_from_json(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

inline json to_json(const RatVec& v) {
  json a = json::array();
  for (const auto& q : v) a.push_back(to_json(q));
  return a;
}

inline RatVec ratvec_from_json(const json& j, const std::string& path, int dim = -1) {
  if (!j.is_array()) fail(path, "expected an array");
  if (dim >= 0 && static_cast<int>(j.size()) != dim) fail(path, "expected " + std::to_string(dim) + " entries, got " + std::to_string(j.size()));
  RatVec v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(rational_from_json(j[i], path + "/" + std::to_string(i)));
  return v;
}

inline IntVec intvec_from_json(const json& j, const std::string& path, int dim = -1) {
  if (!j.is_array()) fail(path, "expected an array of integers");
  if (dim >= 0 && static_cast<int>(j.size()) != dim) fail(path, "expected " + std::to_string(dim) + " entries, got " + std::to_string(j.size()));
  IntVec v;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer()) fail(path + "/" + std::to_string(i), "expected an integer");
    v.push_back(j[i].get<std::int64_t>());
  }
  return v;
}

inline json to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline json to_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    a.push_back(row);
  }
  return a;
}

inline json to_json(const AffineFunction& l) { return {{"zeta", to_json(l.zeta())}, {"a", to_json(l.a())}}; }

inline AffineFunction affine_from_json(const json& j, int dim, const std::string& path) {
  RatVec z = ratvec_from_json(field(j, "zeta", path), path + "/zeta", dim);
  Rational a = j.contains("a") ? rational_from_json(j["a"], path + "/a") : Rational(0);
  return {std::move(z), std::move(a)};
}

// ---- polytopes ----

inline const std::map<std::string, std::function<DelzantPolytope()>>& preset_table() {
  static const std::map<std::string, std::function<DelzantPolytope()>> table{
      {"interval", presets::interval},       {"p1", presets::interval},      {"projective_plane", presets::projective_plane},
      {"p2", presets::projective_plane},     {"square", presets::square},    {"hirzebruch1", presets::hirzebruch1},
      {"hexagon", presets::hexagon},         {"projective_space3", presets::projective_space3},
      {"p3", presets::projective_space3},    {"cube", presets::cube},
  };
  return table;
}

inline DelzantPolytope preset(const std::string& name) {
  auto it = preset_table().find(name);
  if (it == preset_table().end()) {
    std::string known;
    for (const auto& [k, _] : preset_table()) known += (known.empty() ? "" : ", ") + k;
    throw Error(ErrorKind::InvalidInput, "unknown preset '" + name + "' (known: " + known + ")");
  }
  return it->second();
}

inline json to_json(const DelzantPolytope& p) {
  json facets = json::array();
  for (const auto& h : p.halfspaces()) facets.push_back({{"normal", h.normal}, {"offset", to_json(h.offset)}});
  return {{"dim", p.dim()}, {"facets", facets}};
}

/// {"dim": r, "facets": [{"normal": [...], "offset": q}]} or {"preset": name}.
inline DelzantPolytope polytope_from_json(const json& j, const std::string& path = "") {
  if (j.is_string()) return preset(j.get<std::string>());
  if (j.is_object() && j.contains("preset")) {
    if (!j["preset"].is_string()) fail(path + "/preset", "expected a preset name");
    return preset(j["preset"].get<std::string>());
  }
  const int r = int_from_json(field(j, "dim", path), path + "/dim");
  if (r < 1 || r > kMaxDim) fail(path + "/dim", "dimension must be between 1 and " + std::to_string(kMaxDim));
  const json& fs = field(j, "facets", path);
  if (!fs.is_array()) fail(path + "/facets", "expected an array");
  std::vector<HalfSpace> hs;
  for (std::size_t f = 0; f < fs.size(); ++f) {
    const std::string fp = path + "/facets/" + std::to_string(f);
    hs.push_back({intvec_from_json(field(fs[f], "normal", fp), fp + "/normal", r), rational_from_json(field(fs[f], "offset", fp), fp + "/offset")});
  }
  return DelzantPolytope::from_halfspaces(std::move(hs));
}

// ---- polynomials and weights ----

inline Polynomial polynomial_from_json(const json& j, int dim, const std::string& path) {
  if (j.is_string()) {
    try {
      return parse_polynomial(j.get<std::string>(), dim);
    } catch (const Error& e) {
      fail(path, e.what());
    }
  }
  if (j.is_number()) return Polynomial::constant(dim, rational_from_json(j, path));
  const json& ts = field(j, "terms", path);
  if (!ts.is_array()) fail(path + "/terms", "expected an array");
  Polynomial p(dim);
  for (std::size_t t = 0; t < ts.size(); ++t) {
    const std::string tp = path + "/terms/" + std::to_string(t);
    const IntVec e = intvec_from_json(field(ts[t], "exp", tp), tp + "/exp", dim);
    Exponent ex;
    for (auto k : e) {
      if (k < 0) fail(tp + "/exp", "exponents must be non-negative");
      ex.push_back(static_cast<int>(k));
    }
    p.add_term(ex, rational_from_json(field(ts[t], "coef", tp), tp + "/coef"));
  }
  return p;
}

inline json to_json(const WeightTerm& t) {
  json j = json::object();
  j["scalar"] = t.scalar();
  if (!t.powers().empty()) {
    json ps = json::array();
    for (const auto& f : t.powers()) ps.push_back({{"zeta", to_json(f.base.zeta())}, {"a", to_json(f.base.a())}, {"pow", f.exponent}});
    j["affine_powers"] = ps;
  }
  if (t.exp_part()) j["exp"] = to_json(*t.exp_part());
  if (t.poly()) j["poly"] = t.poly()->to_string();
  return j;
}

inline WeightTerm term_from_json(const json& j, int dim, const std::string& path) {
  if (!j.is_object()) fail(path, "expected a weight term object");
  for (const auto& [k, _] : j.items())
    if (k != "scalar" && k != "affine_powers" && k != "exp" && k != "poly") fail(path + "/" + k, "unknown field");
  WeightTerm t(dim, j.contains("scalar") ? number_from_json(j["scalar"], path + "/scalar") : 1.0);
  if (j.contains("affine_powers")) {
    const json& ps = j["affine_powers"];
    if (!ps.is_array()) fail(path + "/affine_powers", "expected an array");
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const std::string fp = path + "/affine_powers/" + std::to_string(i);
      t.multiply_power(affine_from_json(ps[i], dim, fp), number_from_json(field(ps[i], "pow", fp), fp + "/pow"));
    }
  }
  if (j.contains("exp")) t.multiply_exp(affine_from_json(j["exp"], dim, path + "/exp"));
  if (j.contains("poly")) t.multiply_poly(polynomial_from_json(j["poly"], dim, path + "/poly"));
  return t;
}

/// A number (constant), a string (polynomial), a term object, or
/// {"sum": [term, ...]}.
inline WeightFn weight_from_json(const json& j, int dim, const std::string& path = "") {
  if (j.is_number()) return WeightFn::constant(dim, j.get<double>());
  if (j.is_string()) return WeightFn::polynomial(polynomial_from_json(j, dim, path));
  if (j.is_object() && j.contains("sum")) {
    const json& s = j["sum"];
    if (!s.is_array() || s.empty()) fail(path + "/sum", "expected a non-empty array of terms");
    std::vector<WeightTerm> terms;
    for (std::size_t i = 0; i < s.size(); ++i) terms.push_back(term_from_json(s[i], dim, path + "/sum/" + std::to_string(i)));
    return WeightFn(dim, std::move(terms));
  }
  return WeightFn(dim, {term_from_json(j, dim, path)});
}

inline json to_json(const WeightFn& w) {
  if (w.terms().size() == 1) return to_json(w.terms().front());
  json s = json::array();
  for (const auto& t : w.terms()) s.push_back(to_json(t));
  return {{"sum", s}};
}

// ---- fibrations ----

inline BaseFactor base_factor_from_json(const json& j, const std::string& path) {
  BaseFactor b;
  b.n = j.contains("n") ? int_from_json(j["n"], path + "/n") : 1;
  if (j.contains("k") && j.contains("s")) fail(path, "give either 'k' or 's', not both");
  if (j.contains("k")) b.k = int_from_json(j["k"], path + "/k");
  if (j.contains("s")) b.s = number_from_json(j["s"], path + "/s");
  if (b.n < 1) fail(path + "/n", "must be >= 1");
  if (b.k && *b.k < 1) fail(path + "/k", "must be >= 1");
  return b;
}

inline FibrationSpec fibration_from_json(const json& j, const std::string& path = "") {
  FibrationSpec spec{polytope_from_json(field(j, "fiber", path), path + "/fiber"), {}};
  const int r = spec.fiber.dim();
  if (j.contains("factors")) {
    const json& fs = j["factors"];
    if (!fs.is_array()) fail(path + "/factors", "expected an array");
    for (std::size_t a = 0; a < fs.size(); ++a) {
      const std::string fp = path + "/factors/" + std::to_string(a);
      FibrationFactor f;
      f.base = base_factor_from_json(fs[a], fp);
      f.p = intvec_from_json(field(fs[a], "p", fp), fp + "/p", r);
      if (fs[a].contains("c"))
        f.c = rational_from_json(fs[a]["c"], fp + "/c");
      else if (f.base.k)
        f.c = *f.base.k;
      else
        fail(fp, "missing 'c' (only Fano factors default c to k)");
      spec.factors.push_back(std::move(f));
    }
  }
  return spec;
}

inline json to_json(const BaseFactor& b) {
  json j{{"n", b.n}};
  if (b.k)
    j["k"] = *b.k;
  else
    j["s"] = b.s;
  return j;
}

inline json to_json(const FibrationSpec& s) {
  json fs = json::array();
  for (const auto& f : s.factors) {
    json j = to_json(f.base);
    j["p"] = f.p;
    j["c"] = to_json(f.c);
    fs.push_back(j);
  }
  return {{"fiber", to_json(s.fiber)}, {"factors", fs}};
}

// ---- reports ----

inline json to_json(const FutakiReport& r) {
  json j{{"direction", to_json(r.direction)},
         {"value", r.value},
         {"error_estimate", r.error_estimate},
         {"method", to_string(r.method)},
         {"normalization", to_string(r.normalization)}};
  if (r.exact) j["exact"] = to_json(*r.exact);
  return j;
}

inline json to_json(const ExtremalFunction& e) {
  json res = json::array();
  for (const auto& r : e.residuals) res.push_back(to_json(r));
  // inexact solves carry binary-fraction rationals; print them as decimals
  json ell = e.exact ? to_json(e.ell) : json{{"zeta", to_json(to_vec(e.ell.zeta()))}, {"a", to_double(e.ell.a())}};
  return {{"ell", ell},
          {"coefficients", to_json(Vec(e.coefficients))},
          {"exact", e.exact},
          {"gram_condition_number", e.gram_condition_number},
          {"gram_min_eigenvalue", e.gram_min_eigenvalue},
          {"gram", to_json(e.gram)},
          {"rhs", to_json(Vec(e.rhs))},
          {"residuals", res}};
}

inline json to_json(const SolverResult& s) {
  json trace = json::array();
  for (const auto& t : s.trace)
    trace.push_back({{"xi", to_json(t.xi)},
                     {"objective", t.objective},
                     {"grad_norm", t.grad_norm},
                     {"step", t.step},
                     {"hessian_min_eigenvalue", t.hessian_min_eigenvalue},
                     {"min_vertex_value", t.min_vertex_value}});
  return {{"functional", s.functional},
          {"xi0", to_json(s.xi0)},
          {"objective", s.objective},
          {"gradient", to_json(s.gradient)},
          {"grad_norm", s.grad_norm},
          {"hessian_min_eigenvalue", s.hessian_min_eigenvalue},
          {"iterations", s.iterations},
          {"converged", s.converged},
          {"trace", trace}};
}

inline std::string trace_csv(const SolverResult& s) {
  std::ostringstream out;
  out.precision(17);
  const int r = s.xi0.size();
  out << "iteration";
  for (int i = 0; i < r; ++i) out << ",xi" << i + 1;
  out << ",objective,grad_norm,step,hessian_min_eigenvalue,min_vertex_value\n";
  for (std::size_t k = 0; k < s.trace.size(); ++k) {
    const auto& t = s.trace[k];
    out << k;
    for (int i = 0; i < r; ++i) out << "," << t.xi[i];
    out << "," << t.objective << "," << t.grad_norm << "," << t.step << "," << t.hessian_min_eigenvalue << "," << t.min_vertex_value << "\n";
  }
  return out.str();
}

inline json polytope_info(const DelzantPolytope& p) {
  json verts = json::array();
  for (const auto& v : p.vertices()) verts.push_back(to_json(v));
  json fs = json::array();
  for (const auto& f : facets(p))
    fs.push_back({{"index", f.index}, {"normal", f.halfspace.normal}, {"offset", to_json(f.halfspace.offset)}, {"lattice_measure", to_json(f.lattice_measure)}});
  return {{"polytope", to_json(p)},
          {"vertices", verts},
          {"volume", to_json(volume(p))},
          {"boundary_measure", to_json(boundary_measure(p))},
          {"canonical_fano", p.is_canonical_fano()},
          {"facets", fs}};
}

/// Report envelope shared by every command.
inline json report(const std::string& command, json inputs, json results, Normalization norm) {
  return {{"schema_version", kSchemaVersion},
          {"tool", "wkstab"},
          {"tool_version", kToolVersion},
          {"command", command},
          {"normalization", to_string(norm)},
          {"inputs", std::move(inputs)},
          {"results", std::move(results)}};
}

}  // namespace wkstab::io
