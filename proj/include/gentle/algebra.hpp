// Quivers with length-2 relations: parsing, gentle validation, homological
// smoothness, and enumeration of permitted (relation-free) paths.
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace gentle {

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_, const std::string& what) : std::runtime_error(what), line(line_) {}
};

struct Arrow {
  std::string name;
  int source = -1;  // vertex index
  int target = -1;
};

struct Quiver {
  std::vector<std::string> vertices;  // names, kept in input order
  std::vector<Arrow> arrows;

  int vertex_index(const std::string& name) const;
  int arrow_index(const std::string& name) const;
};

// A length-2 relation (a, b) means "a then b" with t(a) = s(b).
struct Relation {
  int first = -1;  // arrow indices
  int second = -1;
};

struct Violation {
  std::string clause;   // which gentle clause failed
  std::string witness;  // vertex / arrow names involved
};

struct GentleAlgebra {
  Quiver quiver;
  std::vector<Relation> relations;  // sorted by (first, second)

  // Derived tables, valid when the algebra is gentle:
  // at most one permitted successor / forbidden successor per arrow (and duals).
  std::vector<int> perm_succ, forb_succ, perm_pred, forb_pred;  // -1 = none
  int longest_permitted = 0;  // number of arrows in the longest permitted path

  bool forbidden(int a, int b) const;        // (a, b) in I
  int num_vertices() const { return static_cast<int>(quiver.vertices.size()); }
  int num_arrows() const { return static_cast<int>(quiver.arrows.size()); }
  int src(int a) const { return quiver.arrows[a].source; }
  int tgt(int a) const { return quiver.arrows[a].target; }
  const std::string& arrow_name(int a) const { return quiver.arrows[a].name; }
  const std::string& vertex_name(int v) const { return quiver.vertices[v]; }
};

// A path of arrows; consecutive arrows compose head-to-tail (t(a_i) = s(a_{i+1})).
// The empty path is the lazy path at base_vertex.
struct Path {
  std::vector<int> arrows;
  int base_vertex = -1;  // meaningful when arrows is empty

  bool trivial() const { return arrows.empty(); }
  int length() const { return static_cast<int>(arrows.size()); }
  int source(const GentleAlgebra& alg) const {
    return trivial() ? base_vertex : alg.src(arrows.front());
  }
  int target(const GentleAlgebra& alg) const {
    return trivial() ? base_vertex : alg.tgt(arrows.back());
  }
  bool operator==(const Path& o) const {
    return arrows == o.arrows && (!trivial() || base_vertex == o.base_vertex);
  }
  bool operator<(const Path& o) const {
    if (arrows != o.arrows) return arrows < o.arrows;
    return trivial() && base_vertex < o.base_vertex;
  }
};

std::string path_to_string(const GentleAlgebra& alg, const Path& p);

// --- parsing and serialization -------------------------------------------

// Structural validation only (references, composability, connectivity);
// gentleness is reported separately by validate_gentle.
GentleAlgebra parse_algebra(const std::string& text);
GentleAlgebra algebra_from_json(const nlohmann::json& j);
std::string serialize_algebra(const GentleAlgebra& alg);  // canonical text form
nlohmann::json algebra_to_json(const GentleAlgebra& alg);

// --- the gentle conditions -------------------------------------------------

// Checks the six clauses of the gentle definition plus admissibility and
// connectivity; an empty result means gentle.
std::vector<Violation> validate_gentle(const Quiver& quiver, const std::vector<Relation>& relations);

struct SmoothResult {
  bool smooth = true;
  std::vector<int> witness_cycle;  // arrow indices of a fully-related cycle
};

// No oriented arrow cycle with every cyclically-consecutive composition in I.
SmoothResult is_homologically_smooth(const GentleAlgebra& alg);

// --- permitted paths -------------------------------------------------------

// All relation-free paths from vertex v to vertex u, including the lazy path
// when v == u.  Requires admissibility (checked by validate_gentle).
std::vector<Path> permitted_paths(const GentleAlgebra& alg, int v, int u);

// Every permitted path of the algebra (any endpoints), trivial paths included.
std::vector<Path> all_permitted_paths(const GentleAlgebra& alg);

// Fill in the successor/predecessor tables; throws if the algebra is not
// gentle or not admissible.  parse_algebra calls this when possible.
void build_tables(GentleAlgebra& alg);

}  // namespace gentle
