#pragma once

// Delzant moment polytopes in exact rational arithmetic: vertex enumeration,
// the Delzant check, pulling triangulations and lattice-normalized facets.

#include <algorithm>
#include <functional>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "wkstab/affine.hpp"
#include "wkstab/error.hpp"
#include "wkstab/rational.hpp"

namespace wkstab {

/// {x : <normal, x> + offset >= 0} with a primitive integer normal.
struct HalfSpace {
  IntVec normal;
  Rational offset;

  Rational eval(const RatVec& x) const { return dot(normal, x) + offset; }
  AffineFunction as_affine() const {
    RatVec z(normal.size());
    for (std::size_t i = 0; i < normal.size(); ++i) z[i] = normal[i];
    return {z, offset};
  }
  double euclidean_norm() const {
    double s = 0;
    for (auto u : normal) s += static_cast<double>(u) * static_cast<double>(u);
    return std::sqrt(s);
  }
};

struct Simplex {
  std::vector<RatVec> vertices;  // dim + 1 points

  int dim() const { return static_cast<int>(vertices.size()) - 1; }

  /// det[v1 - v0, ..., vr - v0]; 1 for a point.
  Rational signed_det() const {
    const int r = dim();
    RatMatrix m(static_cast<std::size_t>(r), RatVec(static_cast<std::size_t>(r)));
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j)
        m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            vertices[static_cast<std::size_t>(j + 1)][static_cast<std::size_t>(i)] - vertices[0][static_cast<std::size_t>(i)];
    return determinant(std::move(m));
  }

  Rational volume() const {
    Rational d = signed_det();
    return (d < 0 ? Rational(-d) : d) / factorial(dim());
  }
};

using Triangulation = std::vector<Simplex>;

class DelzantPolytope;

/// A facet F_j as a lower-dimensional Delzant polytope in lattice
/// coordinates of the hyperplane, with x = embedding(y). Because the
/// embedding is unimodular, Lebesgue measure dy is exactly the lattice
/// boundary measure d(sigma) (dL_j ^ d(sigma) = dVol); the Euclidean facet
/// measure is d(sigma) / density.
struct Facet;

class DelzantPolytope {
 public:
  /// Builds and validates a Delzant polytope. Throws Unbounded,
  /// NotFullDimensional, NotDelzant or RedundantFacet.
  static DelzantPolytope from_halfspaces(std::vector<HalfSpace> halfspaces);

  /// The zero-dimensional polytope (a single point); facets of intervals.
  static DelzantPolytope point() {
    DelzantPolytope p;
    p.dim_ = 0;
    p.vertices_ = {RatVec{}};
    p.vertex_facets_ = {{}};
    return p;
  }

  int dim() const { return dim_; }
  const std::vector<HalfSpace>& halfspaces() const { return halfspaces_; }
  const std::vector<RatVec>& vertices() const { return vertices_; }
  const std::vector<int>& facets_at_vertex(int v) const { return vertex_facets_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& vertices_on_facet(int f) const { return facet_vertices_[static_cast<std::size_t>(f)]; }
  std::size_t num_facets() const { return halfspaces_.size(); }

  /// Every offset equals 1, i.e. L_j(0) = 1 for all facets.
  bool is_canonical_fano() const {
    if (halfspaces_.empty()) return false;
    return std::all_of(halfspaces_.begin(), halfspaces_.end(), [](const HalfSpace& h) { return h.offset == 1; });
  }

  bool contains_in_interior(const RatVec& x) const {
    return std::all_of(halfspaces_.begin(), halfspaces_.end(), [&](const HalfSpace& h) { return h.eval(x) > 0; });
  }

  /// Minimum of an affine function over the polytope (attained at a vertex).
  Rational min_over(const AffineFunction& l) const {
    Rational m = l.eval(vertices_.front());
    for (const auto& v : vertices_) m = std::min(m, l.eval(v));
    return m;
  }
  Rational max_over(const AffineFunction& l) const {
    Rational m = l.eval(vertices_.front());
    for (const auto& v : vertices_) m = std::max(m, l.eval(v));
    return m;
  }

  /// Index of the lexicographically smallest vertex.
  int lex_min_vertex(const std::vector<int>& ids) const {
    return *std::min_element(ids.begin(), ids.end(), [&](int a, int b) {
      return vertices_[static_cast<std::size_t>(a)] < vertices_[static_cast<std::size_t>(b)];
    });
  }

  RatVec vertex_centroid() const {
    RatVec c(static_cast<std::size_t>(dim_), Rational(0));
    for (const auto& v : vertices_)
      for (std::size_t i = 0; i < c.size(); ++i) c[i] += v[i];
    for (auto& ci : c) ci /= static_cast<long>(vertices_.size());
    return c;
  }

  /// Delta + t.
  DelzantPolytope translated(const RatVec& t) const {
    std::vector<HalfSpace> hs = halfspaces_;
    for (auto& h : hs) h.offset -= dot(h.normal, t);
    return from_halfspaces(std::move(hs));
  }

  /// {L_j >= eps for all j}; same combinatorics as Delta for small eps.
  DelzantPolytope shrunk(const Rational& eps) const {
    std::vector<HalfSpace> hs = halfspaces_;
    for (auto& h : hs) h.offset -= eps;
    return from_halfspaces(std::move(hs));
  }

  /// Radius of the largest ball centred at the vertex centroid, a cheap
  /// lower bound for the inradius.
  double centroid_inradius() const {
    RatVec c = vertex_centroid();
    double r = INFINITY;
    for (const auto& h : halfspaces_) r = std::min(r, to_double(h.eval(c)) / h.euclidean_norm());
    return r;
  }

 private:
  int dim_ = 0;
  std::vector<HalfSpace> halfspaces_;
  std::vector<RatVec> vertices_;
  std::vector<std::vector<int>> vertex_facets_;
  std::vector<std::vector<int>> facet_vertices_;
};

struct Facet {
  int index = 0;
  HalfSpace halfspace;
  DelzantPolytope polytope;  // dimension r - 1
  AffineMap embedding;       // lattice coordinates -> t*
  double density = 1.0;      // 1 / |u_j|_2
  Rational lattice_measure;  // d(sigma)-measure of the facet
};

namespace detail {

inline void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  if (k > n) return;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

inline std::string format_point(const RatVec& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + to_string(v[i]);
  return s + ")";
}

/// Affine rank (dimension of the affine hull) of a point set.
inline int affine_rank(const std::vector<RatVec>& pts) {
  if (pts.size() <= 1) return 0;
  RatMatrix m;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    RatVec row(pts[0].size());
    for (std::size_t k = 0; k < row.size(); ++k) row[k] = pts[i][k] - pts[0][k];
    m.push_back(std::move(row));
  }
  return rank(std::move(m));
}

/// Integer unimodular U with u^T U = e_1^T, for primitive u. Column 0 is a
/// lattice vector w with <u, w> = 1; columns 1.. span the lattice of u^perp.
inline std::vector<IntVec> unimodular_completion(const IntVec& u) {
  const std::size_t r = u.size();
  IntVec a = u;
  std::vector<IntVec> cols(r, IntVec(r, 0));
  for (std::size_t i = 0; i < r; ++i) cols[i][i] = 1;
  while (true) {
    std::size_t pivot = r;
    for (std::size_t i = 0; i < r; ++i)
      if (a[i] != 0 && (pivot == r || std::llabs(a[i]) < std::llabs(a[pivot]))) pivot = i;
    bool done = true;
    for (std::size_t j = 0; j < r; ++j) {
      if (j == pivot || a[j] == 0) continue;
      done = false;
      const std::int64_t q = a[j] / a[pivot];
      a[j] -= q * a[pivot];
      for (std::size_t k = 0; k < r; ++k) cols[j][k] -= q * cols[pivot][k];
    }
    if (done) {
      if (a[pivot] != 1 && a[pivot] != -1) throw Error(ErrorKind::InvalidInput, "normal is not primitive");
      if (a[pivot] == -1)
        for (auto& c : cols[pivot]) c = -c;
      std::swap(cols[0], cols[pivot]);
      return cols;
    }
  }
}

}  // namespace detail

inline DelzantPolytope DelzantPolytope::from_halfspaces(std::vector<HalfSpace> halfspaces) {
  if (halfspaces.empty()) throw Error(ErrorKind::InvalidInput, "polytope needs at least one half-space");
  const int r = static_cast<int>(halfspaces.front().normal.size());
  if (r < 1) throw Error(ErrorKind::InvalidInput, "polytope dimension must be >= 1");
  if (r > kMaxDim) throw Error(ErrorKind::InvalidInput, "polytope dimension exceeds " + std::to_string(kMaxDim));
  for (const auto& h : halfspaces) {
    if (static_cast<int>(h.normal.size()) != r) throw Error(ErrorKind::InvalidInput, "inconsistent normal lengths");
    const auto g = gcd_of(h.normal);
    if (g == 0) throw Error(ErrorKind::InvalidInput, "zero normal");
    if (g != 1) throw Error(ErrorKind::InvalidInput, "normal " + detail::format_point(RatVec(h.normal.begin(), h.normal.end())) + " is not primitive");
  }
  const int n = static_cast<int>(halfspaces.size());

  // Recession cone {d : U d >= 0} must be trivial. Normals must span R^r,
  // and no extreme ray (null vector of r-1 normals) may satisfy all
  // constraints.
  {
    RatMatrix all;
    for (const auto& h : halfspaces) all.emplace_back(h.normal.begin(), h.normal.end());
    if (rank(all) < r) throw Error(ErrorKind::Unbounded, "facet normals do not span R^" + std::to_string(r));
    bool unbounded = false;
    RatVec ray_found;
    detail::for_each_subset(n, r - 1, [&](const std::vector<int>& idx) {
      if (unbounded) return;
      // Null space of the (r-1) x r system: cofactor vector.
      RatVec d(static_cast<std::size_t>(r));
      for (int col = 0; col < r; ++col) {
        RatMatrix minor;
        for (int i : idx) {
          RatVec row;
          for (int k = 0; k < r; ++k)
            if (k != col) row.push_back(halfspaces[static_cast<std::size_t>(i)].normal[static_cast<std::size_t>(k)]);
          minor.push_back(std::move(row));
        }
        Rational det = r == 1 ? Rational(1) : determinant(std::move(minor));
        d[static_cast<std::size_t>(col)] = (col % 2 == 0) ? det : Rational(-det);
      }
      if (std::all_of(d.begin(), d.end(), [](const Rational& x) { return x == 0; })) return;
      for (int sign : {1, -1}) {
        bool ok = true;
        for (const auto& h : halfspaces)
          if (sign * dot(h.normal, d) < 0) ok = false;
        if (ok) {
          unbounded = true;
          ray_found = d;
          if (sign < 0)
            for (auto& x : ray_found) x = -x;
        }
      }
    });
    if (unbounded) throw Error(ErrorKind::Unbounded, "recession direction " + detail::format_point(ray_found));
  }

  DelzantPolytope p;
  p.dim_ = r;
  p.halfspaces_ = std::move(halfspaces);
  const auto& hs = p.halfspaces_;

  std::map<RatVec, int> index;
  detail::for_each_subset(n, r, [&](const std::vector<int>& idx) {
    RatMatrix a;
    RatVec b;
    for (int i : idx) {
      a.emplace_back(hs[static_cast<std::size_t>(i)].normal.begin(), hs[static_cast<std::size_t>(i)].normal.end());
      b.push_back(-hs[static_cast<std::size_t>(i)].offset);
    }
    auto x = solve_exact(std::move(a), std::move(b));
    if (!x) return;
    for (const auto& h : hs)
      if (h.eval(*x) < 0) return;
    index.try_emplace(*x, 0);
  });
  if (index.empty()) throw Error(ErrorKind::NotFullDimensional, "the half-spaces have empty intersection");
  for (const auto& [v, _] : index) p.vertices_.push_back(v);  // lexicographic order

  p.vertex_facets_.assign(p.vertices_.size(), {});
  p.facet_vertices_.assign(hs.size(), {});
  for (std::size_t v = 0; v < p.vertices_.size(); ++v)
    for (std::size_t j = 0; j < hs.size(); ++j)
      if (hs[j].eval(p.vertices_[v]) == 0) {
        p.vertex_facets_[v].push_back(static_cast<int>(j));
        p.facet_vertices_[j].push_back(static_cast<int>(v));
      }

  const RatVec c = p.vertex_centroid();
  for (const auto& h : hs)
    if (h.eval(c) == 0) throw Error(ErrorKind::NotFullDimensional, "polytope lies in a hyperplane");

  for (std::size_t j = 0; j < hs.size(); ++j) {
    std::vector<RatVec> pts;
    for (int v : p.facet_vertices_[j]) pts.push_back(p.vertices_[static_cast<std::size_t>(v)]);
    if (pts.empty() || detail::affine_rank(pts) != r - 1)
      throw Error(ErrorKind::RedundantFacet, "half-space " + std::to_string(j) + " does not support a facet");
  }

  for (std::size_t v = 0; v < p.vertices_.size(); ++v) {
    const auto& inc = p.vertex_facets_[v];
    if (static_cast<int>(inc.size()) != r)
      throw Error(ErrorKind::NotDelzant, "vertex " + detail::format_point(p.vertices_[v]) + " lies on " +
                                             std::to_string(inc.size()) + " facets (not simple)");
    RatMatrix m;
    for (int j : inc) m.emplace_back(hs[static_cast<std::size_t>(j)].normal.begin(), hs[static_cast<std::size_t>(j)].normal.end());
    Rational det = determinant(std::move(m));
    if (det != 1 && det != -1)
      throw Error(ErrorKind::NotDelzant, "vertex " + detail::format_point(p.vertices_[v]) + " has normal determinant " + to_string(det));
  }
  return p;
}

namespace detail {

// Pulling triangulation of the face spanned by `ids` (of dimension `dim`):
// cone from the lexicographically smallest vertex over the triangulated
// subfaces not containing it. Subfaces are intersections with facets.
inline void triangulate_face(const DelzantPolytope& p, const std::vector<int>& ids, int dim, std::vector<std::vector<int>>& out) {
  if (dim == 0) {
    out.push_back({ids.front()});
    return;
  }
  const int apex = p.lex_min_vertex(ids);
  const std::set<int> face(ids.begin(), ids.end());
  std::set<std::vector<int>> seen;
  for (std::size_t j = 0; j < p.num_facets(); ++j) {
    std::vector<int> sub;
    for (int v : p.vertices_on_facet(static_cast<int>(j)))
      if (face.count(v)) sub.push_back(v);
    if (sub.empty() || std::find(sub.begin(), sub.end(), apex) != sub.end()) continue;
    std::vector<RatVec> pts;
    for (int v : sub) pts.push_back(p.vertices()[static_cast<std::size_t>(v)]);
    if (affine_rank(pts) != dim - 1 || !seen.insert(sub).second) continue;
    std::vector<std::vector<int>> sub_simplices;
    triangulate_face(p, sub, dim - 1, sub_simplices);
    for (auto& s : sub_simplices) {
      s.insert(s.begin(), apex);
      out.push_back(std::move(s));
    }
  }
}

}  // namespace detail

/// Deterministic pulling triangulation (fan from the lexicographically
/// smallest vertex, recursively). Simplices are positively oriented.
inline Triangulation triangulate(const DelzantPolytope& p) {
  if (p.dim() == 0) return {Simplex{{RatVec{}}}};
  std::vector<int> all(p.vertices().size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  std::vector<std::vector<int>> idx;
  detail::triangulate_face(p, all, p.dim(), idx);
  Triangulation t;
  for (const auto& s : idx) {
    Simplex simplex;
    for (int v : s) simplex.vertices.push_back(p.vertices()[static_cast<std::size_t>(v)]);
    if (simplex.signed_det() < 0) std::swap(simplex.vertices[simplex.vertices.size() - 1], simplex.vertices[simplex.vertices.size() - 2]);
    t.push_back(std::move(simplex));
  }
  return t;
}

inline Rational volume(const DelzantPolytope& p) {
  Rational v = 0;
  for (const auto& s : triangulate(p)) v += s.volume();
  return v;
}

/// All facets with their lattice embeddings.
inline std::vector<Facet> facets(const DelzantPolytope& p) {
  const int r = p.dim();
  std::vector<Facet> out;
  for (std::size_t j = 0; j < p.num_facets(); ++j) {
    const HalfSpace& h = p.halfspaces()[j];
    Facet f;
    f.index = static_cast<int>(j);
    f.halfspace = h;
    f.density = 1.0 / h.euclidean_norm();

    const auto cols = detail::unimodular_completion(h.normal);
    const RatVec& x0 = p.vertices()[static_cast<std::size_t>(p.vertices_on_facet(static_cast<int>(j)).front())];
    f.embedding.origin = x0;
    f.embedding.linear.assign(static_cast<std::size_t>(r), RatVec(static_cast<std::size_t>(r - 1)));
    for (int i = 0; i < r; ++i)
      for (int k = 1; k < r; ++k) f.embedding.linear[static_cast<std::size_t>(i)][static_cast<std::size_t>(k - 1)] = cols[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];

    if (r == 1) {
      f.polytope = DelzantPolytope::point();
      f.lattice_measure = 1;
    } else {
      std::set<int> on_facet(p.vertices_on_facet(static_cast<int>(j)).begin(), p.vertices_on_facet(static_cast<int>(j)).end());
      std::vector<HalfSpace> sub;
      for (std::size_t k = 0; k < p.num_facets(); ++k) {
        if (k == j) continue;
        const auto& vk = p.vertices_on_facet(static_cast<int>(k));
        if (std::none_of(vk.begin(), vk.end(), [&](int v) { return on_facet.count(v) > 0; })) continue;
        const HalfSpace& hk = p.halfspaces()[k];
        IntVec n(static_cast<std::size_t>(r - 1), 0);
        for (int c = 1; c < r; ++c)
          for (int i = 0; i < r; ++i) n[static_cast<std::size_t>(c - 1)] += hk.normal[static_cast<std::size_t>(i)] * cols[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)];
        Rational off = hk.eval(x0);
        const auto g = gcd_of(n);
        if (g == 0) continue;
        for (auto& x : n) x /= g;
        off /= g;
        sub.push_back({n, off});
      }
      f.polytope = DelzantPolytope::from_halfspaces(std::move(sub));
      f.lattice_measure = volume(f.polytope);
    }
    out.push_back(std::move(f));
  }
  return out;
}

/// Total d(sigma)-measure of the boundary.
inline Rational boundary_measure(const DelzantPolytope& p) {
  Rational s = 0;
  for (const auto& f : facets(p)) s += f.lattice_measure;
  return s;
}

/// Named canonical Fano polytopes used throughout tests and the CLI.
namespace presets {

inline DelzantPolytope interval() { return DelzantPolytope::from_halfspaces({{{1}, 1}, {{-1}, 1}}); }
inline DelzantPolytope projective_plane() {
  return DelzantPolytope::from_halfspaces({{{1, 0}, 1}, {{0, 1}, 1}, {{-1, -1}, 1}});
}
inline DelzantPolytope square() {
  return DelzantPolytope::from_halfspaces({{{1, 0}, 1}, {{-1, 0}, 1}, {{0, 1}, 1}, {{0, -1}, 1}});
}
/// First Hirzebruch surface (P^2 blown up at a point).
inline DelzantPolytope hirzebruch1() {
  return DelzantPolytope::from_halfspaces({{{1, 0}, 1}, {{0, 1}, 1}, {{-1, -1}, 1}, {{0, -1}, 1}});
}
/// P^2 blown up at three points.
inline DelzantPolytope hexagon() {
  return DelzantPolytope::from_halfspaces(
      {{{1, 0}, 1}, {{0, 1}, 1}, {{-1, -1}, 1}, {{-1, 0}, 1}, {{0, -1}, 1}, {{1, 1}, 1}});
}
inline DelzantPolytope projective_space3() {
  return DelzantPolytope::from_halfspaces({{{1, 0, 0}, 1}, {{0, 1, 0}, 1}, {{0, 0, 1}, 1}, {{-1, -1, -1}, 1}});
}
inline DelzantPolytope cube() {
  return DelzantPolytope::from_halfspaces(
      {{{1, 0, 0}, 1}, {{-1, 0, 0}, 1}, {{0, 1, 0}, 1}, {{0, -1, 0}, 1}, {{0, 0, 1}, 1}, {{0, 0, -1}, 1}});
}

}  // namespace presets

}  // namespace wkstab
