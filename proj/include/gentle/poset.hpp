// The generation preorder on arc collections and the bounded poset of
// string-generated thick subcategories.  Membership is decided by a bounded
// search over certified gluings; every positive answer carries a replayable
// factorization certificate, and "bound exhausted" is kept distinct from a
// definitive "no".
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gentle/arcs.hpp"

namespace gentle {

enum class Outcome { yes, no, bound_exhausted };

// A concatenation witness: starting from one collection arc, fold certified
// gluings with further collection arcs until the target class is reached.
struct Factorization {
  struct Step {
    int arc = -1;       // index into the collection
    int state_end = 0;  // end of the running word used for the gluing
    int arc_end = 0;    // end of the collection arc used for the gluing
    GradedString result;
  };
  int start_arc = -1;
  GradedString start;
  std::vector<Step> steps;
};

struct Generated {
  Outcome outcome = Outcome::bound_exhausted;
  std::optional<Factorization> factorization;  // present iff outcome == yes
  bool pruned = false;                         // some state exceeded the bound
  std::string reason;                          // refutation note for "no"
};

struct LeqResult {
  Outcome outcome = Outcome::bound_exhausted;
  std::vector<Factorization> certificates;  // one per arc of the left side on yes
  std::string reason;
};

struct BandElimination {
  bool no_string_present = false;
  bool bound_exhausted = false;
  std::vector<GradedString> strings;  // replacement generators when successful
  std::vector<std::string> certificates;
};

struct ThickPoset {
  explicit ThickPoset(const GentleAlgebra& alg, int field_order = 2);

  const GentleAlgebra& alg;
  ArcModel model;

  // Is the target string generated by the collection?  bound < 0 means the
  // default 2 * (letters(target) + |c|) + 2 on word length.
  Generated is_generated(const GradedString& target, const std::vector<GradedString>& c,
                         int bound = -1);

  // Replay a factorization certificate against the collection and target.
  bool verify(const Factorization& f, const std::vector<GradedString>& c,
              const GradedString& target);

  LeqResult leq_gen(const std::vector<GradedString>& a, const std::vector<GradedString>& b,
                    int bound = -1);
  Outcome equiv_gen(const std::vector<GradedString>& a, const std::vector<GradedString>& b,
                    int bound = -1);

  // Replace every band generator by two string generators (certified), or
  // report that no string object exists in the generated subcategory.
  BandElimination eliminate_bands(const std::vector<GradedString>& strings,
                                  const std::vector<GradedBand>& bands, int letter_bound = 8);

  struct Poset {
    struct Node {
      std::vector<GradedString> rep;                       // canonical representative
      std::vector<std::vector<GradedString>> members;      // explored equivalent collections
    };
    std::vector<Node> nodes;
    std::vector<std::pair<int, int>> edges;    // covering relations lo -> hi
    std::vector<std::pair<int, int>> unknown;  // bound-exhausted comparisons
  };
  // Enumerate connected arc collections whose arcs have <= letter_bound
  // letters (at most max_arcs arcs each), group them by mutual generation and
  // return the Hasse diagram of the certified order.
  Poset build_poset(int letter_bound, int max_arcs = 4, int bound = -1);

 private:
  std::string collection_key(const std::vector<GradedString>& c);
  std::map<std::string, Generated> memo_;
};

}  // namespace gentle
