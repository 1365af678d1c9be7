#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "support.hpp"
#include "wkstab/polytope.hpp"

namespace {

using namespace wkstab;

RatVec rv(std::initializer_list<long> xs) {
  RatVec v;
  for (long x : xs) v.emplace_back(x);
  return v;
}

// Shoelace area of a convex polygon, vertices sorted by angle about the
// vertex centroid. Independent of the pulling triangulation.
double shoelace(const DelzantPolytope& p) {
  const RatVec c = p.vertex_centroid();
  std::vector<std::pair<double, RatVec>> pts;
  for (const auto& v : p.vertices()) pts.emplace_back(std::atan2(to_double(v[1] - c[1]), to_double(v[0] - c[0])), v);
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  Rational twice = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const RatVec& a = pts[i].second;
    const RatVec& b = pts[(i + 1) % pts.size()].second;
    twice += a[0] * b[1] - a[1] * b[0];
  }
  return to_double(twice) / 2;
}

TEST(Polytope, IntervalVertices) {
  auto p = presets::interval();
  ASSERT_EQ(p.vertices().size(), 2u);
  EXPECT_EQ(p.vertices()[0], rv({-1}));
  EXPECT_EQ(p.vertices()[1], rv({1}));
}

TEST(Polytope, ProjectivePlaneVertices) {
  auto p = presets::projective_plane();
  std::vector<RatVec> expected = {rv({-1, -1}), rv({-1, 2}), rv({2, -1})};
  EXPECT_EQ(p.vertices(), expected);
  for (int v = 0; v < 3; ++v) EXPECT_EQ(p.facets_at_vertex(v).size(), 2u);
}

TEST(Polytope, VertexEnumerationMatchesPairwiseIntersection) {
  // Oracle: intersect every pair of facet lines by Cramer's rule and keep
  // feasible points.
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = fixtures::random_delzant(2, rng);
    std::vector<RatVec> found;
    const auto& hs = p.halfspaces();
    for (std::size_t i = 0; i < hs.size(); ++i)
      for (std::size_t j = i + 1; j < hs.size(); ++j) {
        const Rational a(hs[i].normal[0]);
        const Rational b(hs[i].normal[1]);
        const Rational c(hs[j].normal[0]);
        const Rational d(hs[j].normal[1]);
        Rational det = a * d - b * c;
        if (det == 0) continue;
        RatVec x = {(-hs[i].offset * d + b * hs[j].offset) / det, (-a * hs[j].offset + c * hs[i].offset) / det};
        if (std::all_of(hs.begin(), hs.end(), [&](const HalfSpace& h) { return h.eval(x) >= 0; })) found.push_back(x);
      }
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    EXPECT_EQ(found, p.vertices());
  }
}

TEST(Polytope, NotDelzantReportsVertexAndDeterminant) {
  try {
    DelzantPolytope::from_halfspaces({{{1, 0}, 1}, {{0, 1}, 1}, {{-2, -1}, 1}});
    FAIL() << "expected NotDelzant";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotDelzant);
    EXPECT_NE(std::string(e.what()).find("determinant"), std::string::npos) << e.what();
  }
}

TEST(Polytope, ValidationErrors) {
  EXPECT_THROW_KIND(DelzantPolytope::from_halfspaces({{{1, 0}, 1}, {{0, 1}, 1}}), ErrorKind::Unbounded);
  EXPECT_THROW_KIND(DelzantPolytope::from_halfspaces({{{1}, 1}}), ErrorKind::Unbounded);
  EXPECT_THROW_KIND(DelzantPolytope::from_halfspaces({{{1}, 0}, {{-1}, 0}}), ErrorKind::NotFullDimensional);
  EXPECT_THROW_KIND(DelzantPolytope::from_halfspaces({{{2}, 1}, {{-1}, 1}}), ErrorKind::InvalidInput);
  EXPECT_THROW_KIND(DelzantPolytope::from_halfspaces({{{1}, 1}, {{-1}, 1}, {{1}, 5}}), ErrorKind::RedundantFacet);
  EXPECT_THROW_KIND(DelzantPolytope::from_halfspaces({{{1}, 1}, {{-1}, -2}}), ErrorKind::NotFullDimensional);
}

TEST(Polytope, CanonicalFano) {
  EXPECT_TRUE(presets::interval().is_canonical_fano());
  EXPECT_FALSE(DelzantPolytope::from_halfspaces({{{1}, 0}, {{-1}, 2}}).is_canonical_fano());
  EXPECT_TRUE(presets::projective_plane().is_canonical_fano());
  for (const auto& p : {presets::square(), presets::hirzebruch1(), presets::hexagon(), presets::projective_space3(), presets::cube()}) {
    ASSERT_TRUE(p.is_canonical_fano());
    EXPECT_TRUE(p.contains_in_interior(RatVec(static_cast<std::size_t>(p.dim()), Rational(0))));
  }
}

TEST(Polytope, TriangulationVolumes) {
  EXPECT_EQ(triangulate(presets::interval()).size(), 1u);
  Rational total = 0;
  for (const auto& s : triangulate(presets::projective_plane())) {
    EXPECT_GT(s.signed_det(), 0);
    total += s.volume();
  }
  EXPECT_EQ(total, Rational(9, 2));
  auto sq = triangulate(presets::square());
  ASSERT_EQ(sq.size(), 2u);
  for (const auto& s : sq) EXPECT_EQ(s.volume(), 2);
  EXPECT_EQ(volume(presets::cube()), 8);
  EXPECT_EQ(volume(presets::projective_space3()), Rational(32, 3));
}

TEST(Polytope, TriangulationIsDeterministic) {
  auto a = triangulate(presets::hexagon());
  auto b = triangulate(presets::hexagon());
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].vertices, b[i].vertices);
}

TEST(Polytope, RandomVolumesAgreeWithIndependentFormulas) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    auto p = fixtures::random_delzant(2, rng);
    EXPECT_NEAR(to_double(volume(p)), shoelace(p), 1e-9 * shoelace(p));
  }
  // Cone decomposition about an interior point: vol = (1/r) sum_j L_j(c) sigma_j.
  for (int r = 1; r <= 3; ++r)
    for (int trial = 0; trial < 10; ++trial) {
      auto p = fixtures::random_delzant(r, rng);
      const RatVec c = p.vertex_centroid();
      Rational cones = 0;
      for (const auto& f : facets(p)) cones += f.halfspace.eval(c) * f.lattice_measure;
      EXPECT_EQ(cones / r, volume(p));
    }
}

TEST(Polytope, DelzantDeterminantAtEveryVertex) {
  std::mt19937_64 rng(3);
  for (int r = 2; r <= 3; ++r)
    for (int trial = 0; trial < 10; ++trial) {
      auto p = fixtures::random_delzant(r, rng);
      for (std::size_t v = 0; v < p.vertices().size(); ++v) {
        const auto& ids = p.facets_at_vertex(static_cast<int>(v));
        ASSERT_EQ(static_cast<int>(ids.size()), r);
        RatMatrix m;
        for (int j : ids) {
          RatVec row;
          for (auto x : p.halfspaces()[static_cast<std::size_t>(j)].normal) row.emplace_back(x);
          m.push_back(row);
        }
        EXPECT_EQ(abs(determinant(m)), 1);
      }
    }
}

TEST(Polytope, FacetMeasures) {
  auto f1 = facets(presets::interval());
  ASSERT_EQ(f1.size(), 2u);
  for (const auto& f : f1) {
    EXPECT_EQ(f.polytope.dim(), 0);
    EXPECT_EQ(f.lattice_measure, 1);
  }
  auto f2 = facets(presets::square());
  ASSERT_EQ(f2.size(), 4u);
  for (const auto& f : f2) EXPECT_EQ(f.lattice_measure, 2);

  for (const auto& f : facets(presets::projective_plane())) {
    EXPECT_EQ(f.lattice_measure, 3);
    if (f.halfspace.normal == IntVec{-1, -1}) {
      EXPECT_NEAR(to_double(f.lattice_measure) / f.density, 3 * std::sqrt(2.0), 1e-12);
    }
  }
  EXPECT_EQ(boundary_measure(presets::projective_plane()), 9);
  EXPECT_EQ(boundary_measure(presets::square()), 8);
}

TEST(Polytope, FacetEmbeddingLandsOnFacet) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto p = fixtures::random_delzant(3, rng);
    for (const auto& f : facets(p)) {
      for (const auto& y : f.polytope.vertices()) {
        RatVec x = f.embedding.apply(y);
        EXPECT_EQ(f.halfspace.eval(x), 0);
        EXPECT_NE(std::find(p.vertices().begin(), p.vertices().end(), x), p.vertices().end());
      }
      EXPECT_EQ(f.polytope.vertices().size(), p.vertices_on_facet(f.index).size());
    }
  }
}

TEST(Polytope, TranslationAndShrink) {
  auto p = presets::projective_plane().translated({Rational(1, 2), Rational(-3)});
  EXPECT_FALSE(p.is_canonical_fano());
  EXPECT_EQ(volume(p), Rational(9, 2));
  auto s = presets::interval().shrunk(Rational(1, 10));
  EXPECT_EQ(s.vertices()[0], RatVec{Rational(-9, 10)});
  EXPECT_NEAR(presets::square().centroid_inradius(), 1.0, 1e-15);
}

}  // namespace
