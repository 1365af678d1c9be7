#include <gtest/gtest.h>

#include "support.hpp"
#include "wkstab/io.hpp"

namespace {

using namespace wkstab;
using io::json;

std::string parse_error(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse) << e.what();
    return e.what();
  }
  ADD_FAILURE() << "no error";
  return "";
}

TEST(Io, Rationals) {
  EXPECT_EQ(io::to_json(Rational(3)), json(3));
  EXPECT_EQ(io::to_json(Rational(-3, 4)), json("-3/4"));
  EXPECT_EQ(io::rational_from_json(json("2/6"), ""), Rational(1, 3));
  EXPECT_EQ(io::rational_from_json(json("0.1"), ""), Rational(1, 10));
  EXPECT_EQ(io::rational_from_json(json(0.5), ""), Rational(1, 2));
  EXPECT_NE(parse_error([] { io::rational_from_json(json::array(), "/x"); }).find("/x"), std::string::npos);
}

TEST(Io, PolytopeRoundTrip) {
  for (const auto& P : {presets::interval(), presets::hexagon(), presets::cube()}) {
    const json j = io::to_json(P);
    const auto Q = io::polytope_from_json(json::parse(j.dump()));
    EXPECT_EQ(Q.vertices(), P.vertices());
    EXPECT_EQ(io::to_json(Q), j);
  }
  auto half = io::polytope_from_json(json::parse(R"({"dim":1,"facets":[{"normal":[1],"offset":"1/2"},{"normal":[-1],"offset":2}]})"));
  EXPECT_EQ(volume(half), Rational(5, 2));
  EXPECT_EQ(io::polytope_from_json(json("p2")).num_facets(), 3u);
  EXPECT_EQ(io::polytope_from_json(json::parse(R"({"preset":"hexagon"})")).num_facets(), 6u);
  EXPECT_THROW_KIND(io::polytope_from_json(json("nonsense")), ErrorKind::InvalidInput);
  auto msg = parse_error([] { io::polytope_from_json(json::parse(R"({"dim":2,"facets":[{"normal":[1,0],"offset":1},{"normal":[1],"offset":1}]})")); });
  EXPECT_NE(msg.find("/facets/1/normal"), std::string::npos) << msg;
  msg = parse_error([] { io::polytope_from_json(json::parse(R"({"facets":[]})")); });
  EXPECT_NE(msg.find("dim"), std::string::npos) << msg;
  // Geometric validation errors keep their own kind.
  EXPECT_THROW_KIND(io::polytope_from_json(json::parse(R"({"dim":1,"facets":[{"normal":[1],"offset":1}]})")), ErrorKind::Unbounded);
}

TEST(Io, WeightRoundTrip) {
  const std::vector<std::string> specs{
      R"(3.5)",
      R"("x1^2 + 2*x1*x2 + 1/3")",
      R"({"scalar": 2, "affine_powers": [{"zeta": [1, "1/2"], "a": 3, "pow": -4}], "exp": {"zeta": ["-1/3", 0], "a": 0}, "poly": "1 + x2"})",
      R"({"sum": [{"poly": "x1"}, {"scalar": 4, "affine_powers": [{"zeta": [1, 1], "a": 5, "pow": -1}]}]})",
      R"({"poly": {"terms": [{"coef": "1/2", "exp": [2, 0]}, {"coef": 1, "exp": [0, 0]}]}})",
  };
  const auto pts = detail::sample_points(presets::projective_plane(), 20, 4);
  for (const auto& s : specs) {
    const WeightFn w = io::weight_from_json(json::parse(s), 2);
    const WeightFn back = io::weight_from_json(json::parse(io::to_json(w).dump()), 2);
    for (const auto& x : pts) EXPECT_EQ(w.eval(x), back.eval(x)) << s;
  }
  const WeightFn w = io::weight_from_json(json::parse(specs[2]), 2);
  const Vec x = Vec::Constant(2, 0.25);
  EXPECT_NEAR(w.eval(x), 2 * std::pow(0.25 + 0.125 + 3, -4) * std::exp(-0.25 / 3) * 1.25, 1e-15);
  auto msg = parse_error([] { io::weight_from_json(json::parse(R"({"affine_powers":[{"zeta":[1],"pow":2}]})"), 2); });
  EXPECT_NE(msg.find("/affine_powers/0/zeta"), std::string::npos) << msg;
  msg = parse_error([] { io::weight_from_json(json::parse(R"({"bogus": 1})"), 1); });
  EXPECT_NE(msg.find("/bogus"), std::string::npos) << msg;
  msg = parse_error([] { io::weight_from_json(json("x3"), 2); });
  EXPECT_NE(msg.find("unknown variable"), std::string::npos) << msg;
}

TEST(Io, FibrationSpec) {
  auto spec = io::fibration_from_json(json::parse(R"({"fiber": "p1", "factors": [{"n": 1, "k": 2, "p": [1]}, {"n": 2, "s": -1.5, "p": [0], "c": "7/2"}]})"));
  ASSERT_EQ(spec.factors.size(), 2u);
  EXPECT_EQ(spec.factors[0].c, 2);
  EXPECT_EQ(*spec.factors[0].base.k, 2);
  EXPECT_EQ(spec.factors[1].c, Rational(7, 2));
  EXPECT_EQ(spec.factors[1].base.s, -1.5);
  auto back = io::fibration_from_json(json::parse(io::to_json(spec).dump()));
  EXPECT_EQ(io::to_json(back), io::to_json(spec));
  auto msg = parse_error([] { io::fibration_from_json(json::parse(R"({"fiber": "p1", "factors": [{"n": 1, "s": 2, "p": [1]}]})")); });
  EXPECT_NE(msg.find("/factors/0"), std::string::npos) << msg;
  msg = parse_error([] { io::fibration_from_json(json::parse(R"({"fiber": "p1", "factors": [{"k": 2, "p": [1, 0]}]})")); });
  EXPECT_NE(msg.find("/factors/0/p"), std::string::npos) << msg;
}

TEST(Io, Reports) {
  auto I = presets::interval();
  auto v = WeightFn::polynomial(parse_polynomial("x+2", 1));
  auto rep = futaki_fano(I, v, {Rational(1)});
  json j = io::to_json(rep);
  EXPECT_EQ(j["method"], "fano_closed_form");
  EXPECT_EQ(j["normalization"], "polytope");
  EXPECT_EQ(j["exact"], "4/3");

  auto sol = tian_zhu_soliton(I, v);
  json s = io::to_json(sol);
  EXPECT_EQ(s["trace"].size(), sol.trace.size());
  EXPECT_EQ(s["converged"], true);
  const std::string csv = io::trace_csv(sol);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "iteration,xi1,objective,grad_norm,step,hessian_min_eigenvalue,min_vertex_value");
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), sol.trace.size() + 1);

  json info = io::polytope_info(presets::projective_plane());
  EXPECT_EQ(info["volume"], "9/2");
  EXPECT_EQ(info["boundary_measure"], 9);
  EXPECT_EQ(info["canonical_fano"], true);

  // Identical inputs serialize identically.
  auto e1 = io::report("extremal", {{"polytope", io::to_json(I)}}, io::to_json(extremal_affine(I, v, v)), Normalization::Polytope).dump();
  auto e2 = io::report("extremal", {{"polytope", io::to_json(I)}}, io::to_json(extremal_affine(I, v, v)), Normalization::Polytope).dump();
  EXPECT_EQ(e1, e2);
  EXPECT_NE(e1.find("\"schema_version\""), std::string::npos);
}

}  // namespace
