#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gentle/cli.hpp"
#include "gentle/strings.hpp"
#include "json.hpp"

using namespace gentle;
namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out, err;
};

static Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = cli_run(args, out, err);
  return {code, out.str(), err.str()};
}

static std::string tmp_path(const std::string& name) {
  return (fs::temp_directory_path() / name).string();
}

static std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST_CASE("validate: both worked examples pass, bad quivers are rejected by clause") {
  Run r1 = run({"validate", "data/exm1.alg"});
  CHECK(r1.code == 0);
  CHECK(r1.out.find("gentle, homologically smooth") != std::string::npos);
  CHECK(run({"validate", "data/exm2.alg"}).code == 0);

  std::string bad = tmp_path("bad3out.alg");
  std::ofstream(bad) << "vertices: 1 2 3 4\narrows:\n  a: 1 -> 2\n  b: 1 -> 3\n  c: 1 -> 4\n"
                        "relations:\n";
  Run r2 = run({"validate", bad});
  CHECK(r2.code == 1);
  CHECK(r2.out.find("not gentle") != std::string::npos);
  CHECK(r2.out.find("at most two arrows with source v") != std::string::npos);

  std::string cyc = tmp_path("fullcycle.alg");
  std::ofstream(cyc) << "vertices: 1 2 3\narrows:\n  a: 1 -> 2\n  b: 2 -> 3\n  c: 3 -> 1\n"
                        "relations:\n  a b\n  b c\n  c a\n";
  Run r3 = run({"validate", cyc});
  CHECK(r3.code == 1);
  CHECK(r3.out.find("not homologically smooth") != std::string::npos);
}

TEST_CASE("validate --canonical round-trips the algebra file") {
  std::string out1 = tmp_path("exm1_canon.alg");
  std::string out2 = tmp_path("exm1_canon2.alg");
  REQUIRE(run({"validate", "data/exm1.alg", "--canonical", out1}).code == 0);
  REQUIRE(run({"validate", out1, "--canonical", out2}).code == 0);
  CHECK(slurp(out1) == slurp(out2));
}

TEST_CASE("hom: text and json agree") {
  Run t = run({"hom", "data/exm1.alg", "--from", "e@2", "--to", "d c^-"});
  CHECK(t.code == 0);
  CHECK(t.out.find("shift 0: 2") != std::string::npos);
  CHECK(t.out.find("total: 2") != std::string::npos);
  Run j = run({"hom", "data/exm1.alg", "--from", "e@2", "--to", "d c^-", "--format=json"});
  CHECK(j.code == 0);
  nlohmann::json parsed = nlohmann::json::parse(j.out);
  CHECK(parsed["schema"] == "gentle.hom/1");
  CHECK(parsed["total"] == 2);
  CHECK(parsed["dims"]["0"] == 2);
}

TEST_CASE("member: exit codes track the three outcomes") {
  // Positive with verified certificate.
  Run yes = run({"member", "data/a2.alg", "--target", "a", "--collection", "e@1; e@2"});
  CHECK(yes.code == 0);
  CHECK(yes.out.find("certificate replay: ok") != std::string::npos);
  // Definitive refutation.
  Run no = run({"member", "data/exm1.alg", "--target", "e@4", "--collection", "e@2; d c^-"});
  CHECK(no.code == 1);
  CHECK(no.out.find("not generated") != std::string::npos);
  // Starved search bound: undecided, not a "no".
  Run exh = run({"member", "data/a2.alg", "--target", "a", "--collection", "e@1; e@2",
                 "--max-depth", "0"});
  CHECK(exh.code == 3);
  CHECK(exh.out.find("bound exhausted") != std::string::npos);
}

TEST_CASE("usage and parse errors exit 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate", "data/exm1.alg"}).code == 2);
  CHECK(run({"hom", "data/exm1.alg", "--from", "e@2"}).code == 2);
  CHECK(run({"validate", "data/does_not_exist.alg"}).code == 2);
  CHECK(run({"hom", "data/exm1.alg", "--from", "zz", "--to", "e@2"}).code == 2);
  CHECK(run({"help"}).code == 0);
}

TEST_CASE("reduce emits a collection file that feeds back into member") {
  std::string coll = tmp_path("reduced.coll");
  Run r = run({"reduce", "data/exm2.alg", "--strings", "a b c.a.e f.d", "--out", coll});
  REQUIRE(r.code == 0);
  // The emitted file re-parses: idempotent reduce, interior already 0.
  Run again = run({"reduce", "data/exm2.alg", "--strings", coll});
  CHECK(again.code == 0);
  CHECK(again.out.find("# interior trace: 0") != std::string::npos);
  // And certifies membership of the original generator.
  Run mem = run({"member", "data/exm2.alg", "--target", "a b c.a.e f.d", "--collection", coll});
  CHECK(mem.code == 0);
  CHECK(mem.out.find("certificate replay: ok") != std::string::npos);
}

TEST_CASE("strings output re-parses to the same classes") {
  Run r = run({"strings", "data/exm1.alg", "--max-letters", "2"});
  REQUIRE(r.code == 0);
  GentleAlgebra alg = [] {
    std::ifstream in("data/exm1.alg");
    std::ostringstream s;
    s << in.rdbuf();
    return parse_algebra(s.str());
  }();
  std::istringstream lines(r.out);
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    GradedString s = parse_string_literal(alg, line);
    CHECK(format_string(alg, s) == line);
    ++n;
  }
  CHECK(n > 0);
  CHECK(r.out.find("# total: " + std::to_string(n)) != std::string::npos);
}

TEST_CASE("leq / equiv / eliminate-bands verbs") {
  CHECK(run({"leq", "data/a2.alg", "--left", "a", "--right", "e@1; e@2"}).code == 0);
  CHECK(run({"leq", "data/a2.alg", "--left", "e@1", "--right", "e@2"}).code == 1);
  CHECK(run({"equiv", "data/exm1.alg", "--left", "e@2; d c^-", "--right", "e@4; b a^-"}).code == 1);
  Run eb = run({"eliminate-bands", "data/exm1.alg", "--collection", "e@2; [a b^- c d^-]"});
  CHECK(eb.code == 0);
  CHECK(eb.out.find("a^- d c^- b") != std::string::npos);
  CHECK(eb.out.find("certificate") != std::string::npos);
  CHECK(run({"eliminate-bands", "data/exm1.alg", "--collection", "[a b^- c d^-]"}).code == 1);
}

TEST_CASE("poset emits a graph file and render is deterministic") {
  std::string pf = tmp_path("a2.poset");
  Run p = run({"poset", "data/a2.alg", "--max-letters", "2", "--out", pf});
  REQUIRE(p.code == 0);
  std::string text = slurp(pf);
  CHECK(text.find("poset 1") != std::string::npos);
  CHECK(text.find("node 0:") != std::string::npos);
  int edges = 0;
  for (size_t at = text.find("edge"); at != std::string::npos; at = text.find("edge", at + 1))
    ++edges;
  CHECK(edges == 3);

  Run s1 = run({"render", "--poset", pf, "--reproducible"});
  Run s2 = run({"render", "--poset", pf, "--reproducible"});
  REQUIRE(s1.code == 0);
  CHECK(s1.out == s2.out);
  CHECK(s1.out.find("<svg") != std::string::npos);

  Run sc = run({"render", "data/exm1.alg", "--string", "a b^-", "--reproducible"});
  CHECK(sc.code == 0);
  CHECK(sc.out.find("P(1)") != std::string::npos);
  Run st = run({"render", "data/exm1.alg", "--collection", "e@2; d c^-", "--reproducible"});
  CHECK(st.code == 0);
  CHECK(st.out.find("</svg>") != std::string::npos);
}

TEST_CASE("field order is taken from --field or GENTLE_FIELD") {
  Run a = run({"hom", "data/exm1.alg", "--from", "e@2", "--to", "e@2", "--field", "5"});
  CHECK(a.code == 0);
  setenv("GENTLE_FIELD", "3", 1);
  Run b = run({"hom", "data/exm1.alg", "--from", "e@2", "--to", "e@2"});
  unsetenv("GENTLE_FIELD");
  CHECK(b.code == 0);
  CHECK(a.out == b.out);  // self-hom of a stalk is 1 over any field
  setenv("GENTLE_FIELD", "nope", 1);
  Run c = run({"hom", "data/exm1.alg", "--from", "e@2", "--to", "e@2"});
  unsetenv("GENTLE_FIELD");
  CHECK(c.code == 2);
}
