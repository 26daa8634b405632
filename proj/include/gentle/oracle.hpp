// Exact homotopy-category linear algebra over F_p: Hom tables, chain-map
// bases modulo null-homotopy, minimal mapping cones, indecomposability via
// idempotent search, fingerprints, and power-string stabilization.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gentle/complex.hpp"

namespace gentle {

struct HomTable {
  std::map<int, int> dims;  // shift k -> dim hom(A, B[k]); zeros omitted
  int total = 0;

  int at(int k) const {
    auto it = dims.find(k);
    return it == dims.end() ? 0 : it->second;
  }
};

// Sparse fingerprint: (family index, shift) -> hom dim, zeros omitted.
using Fingerprint = std::map<std::pair<int, int>, int>;

enum class Decide { yes, no, undecided };

struct IndecResult {
  Decide status = Decide::undecided;
  std::string note;  // why undecided, or the found idempotent
};

class Oracle {
 public:
  Oracle(const GentleAlgebra& alg, int field_order = 2);

  const GentleAlgebra& alg;
  PrimeField F;
  int idempotent_dim_bound = 12;

  // --- hom spaces ---
  // dim Hom_K(A, B) at shift 0 (chain maps modulo null-homotopies).
  int hom0(const ProjComplex& A, const ProjComplex& B);
  // All shifts over the support-overlap window (padded by one on each side).
  HomTable hom_table(const ProjComplex& A, const ProjComplex& B);
  // Representatives of a basis of Hom_K(A, B) at shift 0.
  std::vector<ChainMap> hom_basis(const ProjComplex& A, const ProjComplex& B);

  // --- cones ---
  // Minimal mapping cone of f: A -> B.
  ProjComplex cone(const ProjComplex& A, const ProjComplex& B, const ChainMap& f);

  // --- decomposability ---
  IndecResult is_indecomposable(const ProjComplex& A);

  // --- fingerprints ---
  // The test family is fixed per oracle: all string classes with at most
  // family_letters letters (complexes at base 0, canonical order).
  void configure_family(int family_letters);
  int family_size() const { return static_cast<int>(family_.size()); }
  const std::vector<GradedString>& family_strings() const { return family_words_; }

  const Fingerprint& fingerprint(const ProjComplex& A);
  // Smallest-|j| shift with fingerprint(A) == fingerprint(shift(B, j)), if any.
  std::optional<int> fp_match_shift(const ProjComplex& A, const ProjComplex& B, int max_shift = 8);

  // --- convenience builders ---
  ProjComplex of_string(const GradedString& s);
  ProjComplex of_band(const GradedBand& b);

  // --- powers of a spherelike string (truncations of the periodic complex) ---
  struct PowerDecomposition {
    Word prefix, loop, suffix;  // power(s, i) = prefix . loop^{i-1} . suffix
  };
  GradedString power(const GradedString& s, int i);
  PowerDecomposition power_decomposition(const GradedString& s);

  struct StabilizationReport {
    std::vector<int> totals;  // hom_{D/Sigma}(S_i, P) for i = 1..i_max
    enum class Kind { constant, increasing, irregular } kind = Kind::irregular;
    int slope = 0;  // for increasing: the eventual common difference
  };
  StabilizationReport stabilization_check(const GradedString& s, const ProjComplex& P, int i_max);

  // Cached permitted paths from v to u.
  const std::vector<Path>& paths_between(int v, int u);

 private:
  // One matrix column/row slot of a degree-t map A -> B: component at degree
  // i, entry (r, c), basis path `path` (empty = lazy).
  struct Slot {
    int i, r, c;
    std::vector<int> path;
    bool operator<(const Slot& o) const {
      return std::tie(i, r, c, path) < std::tie(o.i, o.r, o.c, o.path);
    }
  };
  struct SlotSpace {
    std::vector<Slot> slots;
    std::map<Slot, int> index;
    int dim() const { return static_cast<int>(slots.size()); }
    int find(const Slot& s) const {
      auto it = index.find(s);
      return it == index.end() ? -1 : it->second;
    }
  };

  int hom0_impl(const ProjComplex& A, const ProjComplex& B);  // uncached
  SlotSpace slot_space(const ProjComplex& A, const ProjComplex& B, int t);
  // Chain-map condition matrix (rows: t=-1 slots, cols: t=0 slots).
  FpMat chain_condition(const ProjComplex& A, const ProjComplex& B, const SlotSpace& f_space);
  // Null-homotopy assembly (rows: t=0 slots, cols: t=+1 slots).
  FpMat homotopy_assembly(const ProjComplex& A, const ProjComplex& B, const SlotSpace& f_space,
                          const SlotSpace& h_space);
  ChainMap materialize(const ProjComplex& A, const ProjComplex& B, const SlotSpace& f_space,
                       const std::vector<int>& vec);
  std::vector<int> flatten(const ProjComplex& A, const ProjComplex& B, const SlotSpace& f_space,
                           const ChainMap& f);
  ChainMap compose(const ProjComplex& A, const ProjComplex& B, const ProjComplex& C,
                   const ChainMap& f, const ChainMap& g);  // g . f : A -> C

  std::map<std::pair<int, int>, std::vector<Path>> path_cache_;
  std::map<std::pair<std::string, std::string>, int> hom0_cache_;
  std::map<std::string, Fingerprint> fp_cache_;
  std::vector<GradedString> family_words_;
  std::vector<ProjComplex> family_;
};

}  // namespace gentle
