// Graded homotopy strings and bands: word validity, gradings, the reduction
// calculus used by gluing, canonical forms, enumeration, and literal syntax.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gentle/algebra.hpp"

namespace gentle {

// One homotopy letter: a nonempty relation-free permitted path, read forwards
// (direct) or backwards (inverse).
struct Letter {
  Path path;
  bool inverse = false;

  // Node vertices in word order: a direct letter runs s(path) -> t(path),
  // an inverse letter runs t(path) -> s(path).
  int node_before(const GentleAlgebra& alg) const {
    return inverse ? path.target(alg) : path.source(alg);
  }
  int node_after(const GentleAlgebra& alg) const {
    return inverse ? path.source(alg) : path.target(alg);
  }
  Letter inverted() const { return Letter{path, !inverse}; }
  bool operator==(const Letter& o) const { return inverse == o.inverse && path == o.path; }
};

using Word = std::vector<Letter>;

struct GradedString {
  Word letters;
  int base = 0;       // grading b_0 at the left node
  int basepoint = -1;  // vertex of the lazy string when letters is empty

  bool empty() const { return letters.empty(); }
};

struct GradedBand {
  Word letters;  // cyclic word
  int base = 0;
  int scalar = 1;   // lambda, a unit of the field
  int dimension = 1;
};

struct JunctionViolation {
  int index;            // junction between letters[index] and letters[index+1]
  std::string message;  // which condition failed
};

// --- validity ---------------------------------------------------------------

// Single letter: nonempty relation-free permitted path.
std::optional<std::string> check_letter(const GentleAlgebra& alg, const Letter& l);

// Junction conditions between consecutive letters (see README for the list).
std::optional<std::string> check_junction(const GentleAlgebra& alg, const Letter& a, const Letter& b);

std::vector<JunctionViolation> validate_string(const GentleAlgebra& alg, const Word& w);

// Cyclic validity + equal direct/inverse counts + not a proper power.
std::vector<JunctionViolation> validate_band(const GentleAlgebra& alg, const Word& w);

// #direct - #inverse letters; a cyclic word is gradable iff this is 0.
int band_degree(const Word& w);

bool is_proper_power(const Word& w);

// --- gradings ---------------------------------------------------------------

// Node gradings (b_0..b_n): +1 across direct letters, -1 across inverse ones.
std::vector<int> grade_word(const Word& w, int base);

// --- orientation and equivalence ---------------------------------------------

Word inverse_word(const Word& w);

// Canonical representative of the ~str class: lexicographic minimum of the
// word and its inverse (gradings are quotiented by global shift, so only the
// letters matter; the empty string keeps its basepoint).
Word canonical_string(const GentleAlgebra& alg, const Word& w);
GradedString canonical_string(const GentleAlgebra& alg, const GradedString& s);
bool string_equiv(const GentleAlgebra& alg, const GradedString& a, const GradedString& b);

// Canonical representative of the ~bd class: lexicographic minimum over all
// rotations of the word and of its inverse.
Word canonical_band(const GentleAlgebra& alg, const Word& w);
bool band_equiv(const GentleAlgebra& alg, const GradedBand& a, const GradedBand& b);

GradedBand normalize_band(const GradedBand& b);  // dimension := 1

// --- the reduction calculus ---------------------------------------------------

// Freely reduce a concatenation of letters: cancel inverse pairs (including
// partial path overlap) and fuse composable same-direction letters whose
// seam is relation-free.  Returns nullopt when a seam is not composable at
// all (the concatenation is not a curve).  The result may still fail
// validate_string; callers must check.
std::optional<Word> reduce_word(const GentleAlgebra& alg, Word w);

// --- enumeration ---------------------------------------------------------------

// All homotopy-letter values of the algebra (each nontrivial permitted path,
// both directions), in canonical order.
std::vector<Letter> all_letters(const GentleAlgebra& alg);

// Complete, duplicate-free lists of canonical classes within the letter bound.
// enumerate_strings includes the lazy strings e_v (0 letters).
std::vector<GradedString> enumerate_strings(const GentleAlgebra& alg, int max_letters);
std::vector<GradedBand> enumerate_bands(const GentleAlgebra& alg, int max_letters);

// --- literal syntax -------------------------------------------------------------

// Strings: whitespace-separated letters, `.`-joined arrows within a letter,
// `^-` marks an inverse letter, optional trailing `@base`; the lazy string is
// `e@<vertex>` (optionally `e@<vertex>@<base>`).
// Bands: `[letters]` with optional `;lambda=<k>;dim=<n>` suffix.
GradedString parse_string_literal(const GentleAlgebra& alg, const std::string& text);
GradedBand parse_band_literal(const GentleAlgebra& alg, const std::string& text);
bool is_band_literal(const std::string& text);
std::string format_string(const GentleAlgebra& alg, const GradedString& s);
std::string format_band(const GentleAlgebra& alg, const GradedBand& b);

// Total order on letters used for canonical forms: by arrow-name sequence,
// then direct < inverse.
bool letter_less(const GentleAlgebra& alg, const Letter& a, const Letter& b);
bool word_less(const GentleAlgebra& alg, const Word& a, const Word& b);

}  // namespace gentle
