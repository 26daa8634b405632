#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <set>
#include <sstream>

#include "gentle/arcs.hpp"

using namespace gentle;

static GentleAlgebra load(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return parse_algebra(out.str());
}

static GradedString S(const GentleAlgebra& a, const std::string& lit) {
  return parse_string_literal(a, lit);
}

TEST_CASE("classify_arc trichotomy on exm1") {
  GentleAlgebra e1 = load("data/exm1.alg");
  ArcModel m(e1);
  // The four projective stalks / two-term strings are exceptional open arcs.
  for (const char* lit : {"e@2", "d c^-", "e@4", "b a^-"}) {
    Arc a = m.classify_arc(S(e1, lit));
    CHECK(a.kind == ArcKind::exceptional);
    CHECK(a.self_hom == 1);
    CHECK(!a.closed);
    CHECK(a.self_crossings == 0);
  }
  // The three-letter loops are spherelike and closed.
  Arc s = m.classify_arc(S(e1, "a^- d c^-"));
  CHECK(s.kind == ArcKind::spherelike);
  CHECK(s.self_hom == 2);
  CHECK(s.closed);
  CHECK(s.self_crossings == 0);
  // The five-letter word that runs around the cycle and once more is crossing.
  Arc w = m.classify_arc(S(e1, "a b^- c d^- a"));
  CHECK(w.kind == ArcKind::crossing);
  CHECK(w.self_hom == 3);
  CHECK(w.self_crossings == 1);
  // Totality: every string <= 4 letters lands in exactly one kind.
  for (const GradedString& str : enumerate_strings(e1, 4)) {
    Arc a = m.classify_arc(str);
    CHECK((a.kind == ArcKind::exceptional || a.kind == ArcKind::spherelike ||
           a.kind == ArcKind::crossing));
  }
}

TEST_CASE("glue on A2 produces the two-term string") {
  GentleAlgebra a2 = load("data/a2.alg");
  ArcModel m(a2);
  bool found = false;
  for (int e1 = 0; e1 < 2; ++e1)
    for (int e2 = 0; e2 < 2; ++e2)
      for (const auto& g : m.glue(S(a2, "e@1"), e1, S(a2, "e@2"), e2))
        if (format_string(a2, canonical_string(a2, g.word)) == "a") found = true;
  CHECK(found);
}

TEST_CASE("glue of the exm1 bigon pair yields the spherelike loops") {
  GentleAlgebra e1 = load("data/exm1.alg");
  ArcModel m(e1);
  GradedString A = S(e1, "e@2"), B = S(e1, "d c^-");
  std::set<std::string> words;
  for (int ea = 0; ea < 2; ++ea)
    for (int eb = 0; eb < 2; ++eb)
      for (const auto& g : m.glue(A, ea, B, eb))
        words.insert(format_string(e1, canonical_string(e1, g.word)));
  CHECK(words.count("a^- d c^-") == 1);
  CHECK(words.count("b^- c d^-") == 1);
  // Arcs on opposite sides share no marked point: nothing glues.
  GradedString C = S(e1, "e@4");
  for (int ea = 0; ea < 2; ++ea)
    for (int ec = 0; ec < 2; ++ec) CHECK(m.glue(A, ea, C, ec).empty());
}

TEST_CASE("glue soundness: results are valid strings") {
  GentleAlgebra e1 = load("data/exm1.alg");
  ArcModel m(e1);
  GradedString A = S(e1, "e@2"), B = S(e1, "d c^-");
  for (int ea = 0; ea < 2; ++ea)
    for (int eb = 0; eb < 2; ++eb)
      for (const auto& g : m.glue(A, ea, B, eb))
        CHECK(validate_string(e1, g.word.letters).empty());
}

TEST_CASE("intersection numbers on the exm1 quadruple") {
  GentleAlgebra e1 = load("data/exm1.alg");
  ArcModel m(e1);
  Arc A = m.classify_arc(S(e1, "e@2"));
  Arc B = m.classify_arc(S(e1, "d c^-"));
  Arc C = m.classify_arc(S(e1, "e@4"));
  Arc D = m.classify_arc(S(e1, "b a^-"));
  auto probe = [&](const Arc& x, const Arc& y, int interior, int shared) {
    auto r = m.intersections(x, y);
    CHECK(r.interior == interior);
    CHECK(static_cast<int>(r.shared_endpoints.size()) == shared);
  };
  probe(A, B, 0, 2);  // bigon pair
  probe(A, C, 0, 0);  // opposite sides
  probe(A, D, 1, 0);  // one transversal crossing
  probe(B, C, 1, 0);
  probe(B, D, 0, 0);
  probe(C, D, 0, 2);  // the other bigon pair
  // The two spherelike loops around opposite boundaries cross twice.
  Arc s1 = m.classify_arc(S(e1, "a b^- c"));
  Arc s2 = m.classify_arc(S(e1, "a^- d c^-"));
  probe(s1, s2, 2, 0);
}

TEST_CASE("collections and connectivity") {
  GentleAlgebra e1 = load("data/exm1.alg");
  ArcModel m(e1);
  Arc A = m.classify_arc(S(e1, "e@2"));
  Arc B = m.classify_arc(S(e1, "d c^-"));
  Arc C = m.classify_arc(S(e1, "e@4"));
  Arc D = m.classify_arc(S(e1, "b a^-"));
  CHECK(m.is_arc_collection({A, B}));
  CHECK(m.is_connected({A, B}));
  CHECK(m.is_arc_collection({A, C}));
  CHECK(!m.is_connected({A, C}));
  CHECK(!m.is_arc_collection({A, D}));  // crossing pair
  Arc W = m.classify_arc(S(e1, "a b^- c d^- a"));
  CHECK(!m.is_arc_collection({W}));  // crossing arc alone
  CHECK(m.is_arc_collection({}));    // degenerate input
}

TEST_CASE("marked points of the bigon pair") {
  GentleAlgebra e1 = load("data/exm1.alg");
  ArcModel m(e1);
  Arc A = m.classify_arc(S(e1, "e@2"));
  Arc B = m.classify_arc(S(e1, "d c^-"));
  ArcModel::MarkedPoints mp = m.marked_points({A, B});
  CHECK(mp.num_classes == 2);
  // The bigon identifies end 0 of both arcs and end 1 of both arcs.
  CHECK(mp.at({0, 0}) == mp.at({1, 0}));
  CHECK(mp.at({0, 1}) == mp.at({1, 1}));
  CHECK(mp.at({0, 0}) != mp.at({0, 1}));
  // The indistinguishable lazy ends force recorded (not silent) refusals.
  CHECK(!mp.refused.empty());
}

TEST_CASE("decompose_string on non-crossing input is the identity") {
  GentleAlgebra e1 = load("data/exm1.alg");
  ArcModel m(e1);
  for (const char* lit : {"e@2", "d c^-", "a^- d c^-"}) {
    auto d = m.decompose_string(S(e1, lit));
    CHECK(!d.bound_exhausted);
    REQUIRE(d.parts.size() == 1);
    CHECK(string_equiv(e1, d.parts[0], S(e1, lit)));
  }
}

TEST_CASE("decompose_string resolves the exm1 self-crossing") {
  GentleAlgebra e1 = load("data/exm1.alg");
  ArcModel m(e1);
  Oracle& o = m.oracle;
  GradedString w = S(e1, "a b^- c d^- a");
  auto d = m.decompose_string(w);
  CHECK(!d.bound_exhausted);
  REQUIRE(d.parts.size() == 2);
  for (const GradedString& p : d.parts)
    CHECK(m.classify_arc(p).kind == ArcKind::spherelike);
  // Smoothing certificate: the direct sum of the parts matches a decomposable
  // self-cone of the input.
  ProjComplex x = o.of_string(w);
  bool matched = false;
  HomTable t = o.hom_table(x, x);
  for (const auto& [k, dim] : t.dims) {
    ProjComplex xk = shift(x, k, o.F);
    for (const ChainMap& f : o.hom_basis(x, xk)) {
      ProjComplex c = o.cone(x, xk, f);
      if (c.zero()) continue;
      for (int j = -8; j <= 8; ++j) {
        ProjComplex ds = direct_sum(o.of_string(d.parts[0]),
                                    shift(o.of_string(d.parts[1]), j, o.F), o.F);
        if (o.fp_match_shift(ds, c).has_value()) matched = true;
      }
    }
  }
  CHECK(matched);
}

TEST_CASE("decompose_string on exm2 and the glue round-trip") {
  GentleAlgebra e2 = load("data/exm2.alg");
  ArcModel m(e2);
  Oracle& o = m.oracle;
  // The minimal crossing word splits into two copies of the 3-cycle loop.
  auto d = m.decompose_string(S(e2, "a b c.a b c"));
  CHECK(!d.bound_exhausted);
  REQUIRE(d.parts.size() == 2);
  CHECK(format_string(e2, canonical_string(e2, d.parts[0])) == "a b c");
  CHECK(format_string(e2, canonical_string(e2, d.parts[1])) == "a b c");
  // Extension-type split: re-gluing the parts reproduces the input.
  GradedString w = S(e2, "a b c.a b c.a.e f.d");
  auto d2 = m.decompose_string(w);
  CHECK(!d2.bound_exhausted);
  REQUIRE(d2.parts.size() == 2);
  bool roundtrip = false;
  for (int ea = 0; ea < 2; ++ea)
    for (int eb = 0; eb < 2; ++eb)
      for (const auto& g : m.glue(d2.parts[0], ea, d2.parts[1], eb))
        if (o.fp_match_shift(o.of_string(g.word), o.of_string(w)).has_value()) roundtrip = true;
  CHECK(roundtrip);
}

TEST_CASE("reduce_to_collection") {
  GentleAlgebra e1 = load("data/exm1.alg");
  ArcModel m(e1);
  // Already a collection: returned unchanged.
  auto r0 = m.reduce_to_collection({S(e1, "e@2"), S(e1, "d c^-")});
  CHECK(!r0.bound_exhausted);
  CHECK(r0.arcs.size() == 2);
  CHECK(r0.interior_trace == std::vector<int>{0});
  // A transversal crossing pair resolves in one round.
  auto r1 = m.reduce_to_collection({S(e1, "e@2"), S(e1, "b a^-")});
  CHECK(!r1.bound_exhausted);
  REQUIRE(r1.interior_trace.size() == 2);
  CHECK(r1.interior_trace[0] == 1);
  CHECK(r1.interior_trace[1] == 0);
  for (size_t i = 0; i + 1 < r1.interior_trace.size(); ++i)
    CHECK(r1.interior_trace[i] > r1.interior_trace[i + 1]);
  // The output is pairwise non-crossing.
  for (size_t i = 0; i < r1.arcs.size(); ++i)
    for (size_t j = i + 1; j < r1.arcs.size(); ++j)
      CHECK(m.intersections(r1.arcs[i], r1.arcs[j]).interior == 0);
}

TEST_CASE("to_pointed turns the bigon into a star") {
  GentleAlgebra e1 = load("data/exm1.alg");
  ArcModel m(e1);
  Arc A = m.classify_arc(S(e1, "e@2"));
  Arc B = m.classify_arc(S(e1, "d c^-"));
  ArcModel::PointedCollection p = m.to_pointed({A, B}, 0);
  CHECK(p.rewrites.size() == 1);
  REQUIRE(p.arcs.size() == 2);
  std::set<std::string> words;
  for (const Arc& a : p.arcs) words.insert(format_string(e1, a.string));
  CHECK(words.count("e@2") == 1);
  CHECK(words.count("a^- d c^-") == 1);
  // Star conditions: every arc touches the basepoint class, every non-base
  // class has exactly one end.
  std::map<int, int> degree;
  bool all_touch = true;
  for (size_t i = 0; i < p.arcs.size(); ++i) {
    int c0 = p.points.at({static_cast<int>(i), 0});
    int c1 = p.points.at({static_cast<int>(i), 1});
    if (c0 != p.basepoint && c1 != p.basepoint) all_touch = false;
    if (c0 != p.basepoint) degree[c0]++;
    if (c1 != p.basepoint) degree[c1]++;
  }
  CHECK(all_touch);
  for (const auto& [cls, deg] : degree) CHECK(deg == 1);
  // Disconnected input is rejected.
  Arc C = m.classify_arc(S(e1, "e@4"));
  CHECK_THROWS_AS(m.to_pointed({A, C}, 0), std::invalid_argument);
}

TEST_CASE("regions and tau on the pointed bigon") {
  GentleAlgebra e1 = load("data/exm1.alg");
  ArcModel m(e1);
  Arc A = m.classify_arc(S(e1, "e@2"));
  Arc B = m.classify_arc(S(e1, "d c^-"));
  ArcModel::PointedCollection p = m.to_pointed({A, B}, 0);
  ArcModel::Regions r = m.regions_and_tau(p);
  CHECK(r.num_regions == 4);
  REQUIRE(r.order.size() == 3);
  // tau maps each non-terminal region into the region after the loop's other
  // half-edge; both orbits terminate.
  CHECK(r.tau == std::map<int, int>{{0, 3}, {2, 1}});
  CHECK(r.kinds == std::vector<RegionKind>{RegionKind::terminating, RegionKind::terminal,
                                           RegionKind::terminating, RegionKind::terminal});
  ArcModel::PsiPath psi = m.psi_path(p, r, 0);
  CHECK(psi.tag == LoopTag::string_arc);
  CHECK(string_equiv(e1, psi.word, S(e1, "a^- d c^-")));
  CHECK_THROWS_AS(m.psi_path(p, r, 1), std::invalid_argument);  // terminal region
}

TEST_CASE("all-exceptional star has empty tau domain") {
  GentleAlgebra e1 = load("data/exm1.alg");
  ArcModel m(e1);
  Arc A = m.classify_arc(S(e1, "e@2"));
  ArcModel::PointedCollection p = m.to_pointed({A}, 0);
  ArcModel::Regions r = m.regions_and_tau(p);
  CHECK(r.tau.empty());
  for (RegionKind k : r.kinds) CHECK(k == RegionKind::terminal);
}

TEST_CASE("single spherelike loop gives a cyclic tau orbit of length 1") {
  GentleAlgebra e1 = load("data/exm1.alg");
  ArcModel m(e1);
  Arc s = m.classify_arc(S(e1, "a^- d c^-"));
  ArcModel::PointedCollection p = m.to_pointed({s}, 0);
  ArcModel::Regions r = m.regions_and_tau(p);
  CHECK(r.num_regions == 3);
  REQUIRE(r.tau.count(1) == 1);
  CHECK(r.tau.at(1) == 1);  // fixed point: orbit of length 1
  CHECK(r.kinds[1] == RegionKind::cyclic);
  CHECK(r.kinds[2] == RegionKind::terminal);
  ArcModel::PsiPath psi = m.psi_path(p, r, 1);
  CHECK(psi.orbit.size() == 1);
  CHECK(string_equiv(e1, psi.word, s.string));
  // The loop has odd degree, so the cyclic path is an ungraded loop, not a band.
  CHECK(psi.tag == LoopTag::ungraded_loop);
}

TEST_CASE("psi kind-consistency on non-terminal regions") {
  GentleAlgebra e1 = load("data/exm1.alg");
  ArcModel m(e1);
  Arc A = m.classify_arc(S(e1, "e@2"));
  Arc B = m.classify_arc(S(e1, "d c^-"));
  ArcModel::PointedCollection p = m.to_pointed({A, B}, 0);
  ArcModel::Regions r = m.regions_and_tau(p);
  for (const auto& [reg, img] : r.tau) {
    ArcModel::PsiPath psi = m.psi_path(p, r, reg);
    Arc pa = m.classify_arc(psi.word);
    CHECK(pa.kind != ArcKind::crossing);
    for (const Arc& a : p.arcs) CHECK(m.intersections(pa, a).interior == 0);
  }
}

TEST_CASE("interior morphisms pair up across directions (exm1, <= 4 letters)") {
  GentleAlgebra e1 = load("data/exm1.alg");
  ArcModel m(e1);
  std::vector<Arc> simple;
  for (const GradedString& s : enumerate_strings(e1, 4)) {
    Arc a = m.classify_arc(s);
    if (a.kind != ArcKind::crossing) simple.push_back(a);
  }
  // intersections() throws ModelError when the two directions disagree, so
  // completing the full census is the property.
  int pairs = 0;
  for (size_t i = 0; i < simple.size(); ++i)
    for (size_t j = i + 1; j < simple.size(); ++j) {
      CHECK_NOTHROW(m.intersections(simple[i], simple[j]));
      ++pairs;
    }
  CHECK(pairs > 0);
}
