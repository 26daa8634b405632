// Bounded complexes of projectives with path-linear differentials, and their
// construction from graded strings and bands.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "gentle/fp.hpp"
#include "gentle/strings.hpp"

namespace gentle {

// An element of Hom(P_u, P_v): an F_p-linear combination of permitted paths
// from v to u.  A path is its arrow-index sequence; the empty sequence is the
// lazy path (only meaningful when u == v).
struct AlgElem {
  std::map<std::vector<int>, int> terms;  // path -> nonzero coefficient

  bool zero() const { return terms.empty(); }
  int trivial_coeff() const {
    auto it = terms.find({});
    return it == terms.end() ? 0 : it->second;
  }
};

AlgElem elem_path(const std::vector<int>& path, int coeff);
AlgElem elem_add(const PrimeField& F, const AlgElem& a, const AlgElem& b);
AlgElem elem_scale(const PrimeField& F, const AlgElem& a, int c);
AlgElem elem_neg(const PrimeField& F, const AlgElem& a);
// Composition g . f of f: P_a -> P_b and g: P_b -> P_c (path concatenation
// "g then f", killed by relations at the seam).
AlgElem elem_compose(const GentleAlgebra& alg, const PrimeField& F, const AlgElem& g, const AlgElem& f);
// Inverse of a local endomorphism of P_v (unit trivial coefficient + radical).
AlgElem elem_inverse(const GentleAlgebra& alg, const PrimeField& F, const AlgElem& a);

// Matrix of AlgElem entries; the row/column vertex lists live in the complex.
struct PathMat {
  int rows = 0, cols = 0;
  std::vector<AlgElem> e;

  PathMat() = default;
  PathMat(int r, int c) : rows(r), cols(c), e(static_cast<size_t>(r) * c) {}
  AlgElem& at(int r, int c) { return e[static_cast<size_t>(r) * cols + c]; }
  const AlgElem& at(int r, int c) const { return e[static_cast<size_t>(r) * cols + c]; }
};

// Levels run bottom-up: level k sits in degree deg_min + k.  diffs[k] is the
// differential from level k+1 down to level k (d lowers degree by one).
struct ProjComplex {
  int deg_min = 0;
  std::vector<std::vector<int>> summands;  // vertex indices per level
  std::vector<PathMat> diffs;              // size = levels - 1 (or 0)

  int levels() const { return static_cast<int>(summands.size()); }
  bool zero() const { return summands.empty(); }
  int deg_max() const { return deg_min + levels() - 1; }
  int total_summands() const {
    int n = 0;
    for (const auto& s : summands) n += static_cast<int>(s.size());
    return n;
  }
  // Level index of a degree, or -1 when outside the support window.
  int level_of(int degree) const {
    int k = degree - deg_min;
    return (k >= 0 && k < levels()) ? k : -1;
  }
};

// Drop empty levels at both ends (keeping inner empty levels is fine).
void trim(ProjComplex& c);

bool d2_is_zero(const GentleAlgebra& alg, const PrimeField& F, const ProjComplex& c);
bool is_minimal(const ProjComplex& c);  // all differential entries in the radical

ProjComplex shift(const ProjComplex& c, int k, const PrimeField& F);
ProjComplex direct_sum(const ProjComplex& a, const ProjComplex& b, const PrimeField& F);

// Canonical printable form (used as a cache key and for the dump format).
std::string complex_key(const GentleAlgebra& alg, const ProjComplex& c);

// --- construction from words -------------------------------------------------------

ProjComplex string_to_complex(const GentleAlgebra& alg, const PrimeField& F, const GradedString& s);

// Spec surface: dimension-1 band objects only (use normalize_band first).
ProjComplex band_to_complex(const GentleAlgebra& alg, const PrimeField& F, const GradedBand& b);

// The r-dimensional band object B_{w,lambda,r} (Jordan block on the
// designated component); used by the tube-normalization checks.
ProjComplex band_complex_r(const GentleAlgebra& alg, const PrimeField& F, const GradedBand& b, int r);

// --- cones and minimal models --------------------------------------------------------

// A degree-0 chain map A -> B, stored per A-degree.
struct ChainMap {
  std::map<int, PathMat> comps;  // degree i -> matrix A^i -> B^i
};

bool commutes(const GentleAlgebra& alg, const PrimeField& F, const ProjComplex& a,
              const ProjComplex& b, const ChainMap& f);

// cone(f) = B + A[1] with differential [[d_B, f],[0, -d_A]]; not minimalized.
ProjComplex mapping_cone_raw(const GentleAlgebra& alg, const PrimeField& F, const ProjComplex& a,
                             const ProjComplex& b, const ChainMap& f);

// Strip contractible [P_v = P_v] pairs by Gaussian elimination until every
// differential entry lies in the radical.
ProjComplex minimalize(const GentleAlgebra& alg, const PrimeField& F, ProjComplex c);

}  // namespace gentle
