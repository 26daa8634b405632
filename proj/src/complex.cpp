#include "gentle/complex.hpp"

#include <algorithm>
#include <sstream>

namespace gentle {

// --- AlgElem arithmetic ---------------------------------------------------------

AlgElem elem_path(const std::vector<int>& path, int coeff) {
  AlgElem e;
  if (coeff != 0) e.terms[path] = coeff;
  return e;
}

AlgElem elem_add(const PrimeField& F, const AlgElem& a, const AlgElem& b) {
  AlgElem out = a;
  for (const auto& [p, c] : b.terms) {
    int v = F.add(out.terms.count(p) ? out.terms[p] : 0, c);
    if (v == 0)
      out.terms.erase(p);
    else
      out.terms[p] = v;
  }
  return out;
}

AlgElem elem_scale(const PrimeField& F, const AlgElem& a, int c) {
  AlgElem out;
  c = F.norm(c);
  if (c == 0) return out;
  for (const auto& [p, x] : a.terms) out.terms[p] = F.mul(x, c);
  return out;
}

AlgElem elem_neg(const PrimeField& F, const AlgElem& a) { return elem_scale(F, a, F.p - 1); }

AlgElem elem_compose(const GentleAlgebra& alg, const PrimeField& F, const AlgElem& g,
                     const AlgElem& f) {
  // Morphism composition g . f: paths concatenate as (g's path)(f's path);
  // only the seam can introduce a relation since both factors are permitted.
  AlgElem out;
  for (const auto& [pg, cg] : g.terms)
    for (const auto& [pf, cf] : f.terms) {
      if (!pg.empty() && !pf.empty()) {
        if (alg.tgt(pg.back()) != alg.src(pf.front())) continue;  // mismatched contexts
        if (alg.forbidden(pg.back(), pf.front())) continue;
      }
      std::vector<int> p = pg;
      p.insert(p.end(), pf.begin(), pf.end());
      int v = F.add(out.terms.count(p) ? out.terms[p] : 0, F.mul(cg, cf));
      if (v == 0)
        out.terms.erase(p);
      else
        out.terms[p] = v;
    }
  return out;
}

AlgElem elem_inverse(const GentleAlgebra& alg, const PrimeField& F, const AlgElem& a) {
  int c0 = a.trivial_coeff();
  if (c0 == 0) throw std::domain_error("non-invertible local endomorphism");
  int ic = F.inv(c0);
  // a = c0 (1 + n) with n nilpotent; a^{-1} = c0^{-1} sum (-n)^j.
  AlgElem n = elem_scale(F, a, ic);
  n.terms.erase(std::vector<int>{});
  AlgElem acc = elem_path({}, 1);  // running (-n)^j
  AlgElem sum = acc;
  for (int j = 0; j < alg.longest_permitted + 2 && !acc.zero(); ++j) {
    acc = elem_compose(alg, F, elem_neg(F, n), acc);
    sum = elem_add(F, sum, acc);
  }
  return elem_scale(F, sum, ic);
}

// --- complexes ---------------------------------------------------------------------

void trim(ProjComplex& c) {
  while (!c.summands.empty() && c.summands.back().empty()) {
    c.summands.pop_back();
    if (!c.diffs.empty()) c.diffs.pop_back();
  }
  while (!c.summands.empty() && c.summands.front().empty()) {
    c.summands.erase(c.summands.begin());
    if (!c.diffs.empty()) c.diffs.erase(c.diffs.begin());
    ++c.deg_min;
  }
  if (c.summands.empty()) {
    c.diffs.clear();
    c.deg_min = 0;
  }
}

bool d2_is_zero(const GentleAlgebra& alg, const PrimeField& F, const ProjComplex& c) {
  for (size_t k = 0; k + 1 < c.diffs.size(); ++k) {
    const PathMat& lo = c.diffs[k];       // level k+1 -> level k
    const PathMat& hi = c.diffs[k + 1];   // level k+2 -> level k+1
    for (int r = 0; r < lo.rows; ++r)
      for (int s = 0; s < hi.cols; ++s) {
        AlgElem acc;
        for (int t = 0; t < lo.cols; ++t)
          acc = elem_add(F, acc, elem_compose(alg, F, lo.at(r, t), hi.at(t, s)));
        if (!acc.zero()) return false;
      }
  }
  return true;
}

bool is_minimal(const ProjComplex& c) {
  for (const PathMat& m : c.diffs)
    for (const AlgElem& e : m.e)
      if (e.trivial_coeff() != 0) return false;
  return true;
}

ProjComplex shift(const ProjComplex& c, int k, const PrimeField& F) {
  ProjComplex out = c;
  out.deg_min += k;
  if (k % 2 != 0)
    for (PathMat& m : out.diffs)
      for (AlgElem& e : m.e) e = elem_neg(F, e);
  return out;
}

ProjComplex direct_sum(const ProjComplex& a, const ProjComplex& b, const PrimeField& F) {
  if (a.zero()) return b;
  if (b.zero()) return a;
  ProjComplex out;
  out.deg_min = std::min(a.deg_min, b.deg_min);
  int top = std::max(a.deg_max(), b.deg_max());
  out.summands.resize(top - out.deg_min + 1);
  for (int d = out.deg_min; d <= top; ++d) {
    std::vector<int>& s = out.summands[d - out.deg_min];
    int ka = a.level_of(d), kb = b.level_of(d);
    if (ka >= 0) s.insert(s.end(), a.summands[ka].begin(), a.summands[ka].end());
    if (kb >= 0) s.insert(s.end(), b.summands[kb].begin(), b.summands[kb].end());
  }
  out.diffs.assign(out.levels() > 0 ? out.levels() - 1 : 0, PathMat());
  for (int k = 0; k + 1 < out.levels(); ++k) {
    int d = out.deg_min + k;
    PathMat m(static_cast<int>(out.summands[k].size()), static_cast<int>(out.summands[k + 1].size()));
    int ka = a.level_of(d), kb = b.level_of(d);
    int a_rows = ka >= 0 ? static_cast<int>(a.summands[ka].size()) : 0;
    int ka1 = a.level_of(d + 1), kb1 = b.level_of(d + 1);
    int a_cols = ka1 >= 0 ? static_cast<int>(a.summands[ka1].size()) : 0;
    if (ka >= 0 && ka1 >= 0 && ka < static_cast<int>(a.diffs.size()))
      for (int r = 0; r < a_rows; ++r)
        for (int cix = 0; cix < a_cols; ++cix) m.at(r, cix) = a.diffs[ka].at(r, cix);
    if (kb >= 0 && kb1 >= 0 && kb < static_cast<int>(b.diffs.size())) {
      const PathMat& bm = b.diffs[kb];
      for (int r = 0; r < bm.rows; ++r)
        for (int cix = 0; cix < bm.cols; ++cix) m.at(a_rows + r, a_cols + cix) = bm.at(r, cix);
    }
    out.diffs[k] = std::move(m);
  }
  trim(out);
  return out;
}

std::string complex_key(const GentleAlgebra& alg, const ProjComplex& c) {
  std::ostringstream out;
  out << "deg_min=" << c.deg_min << "\n";
  for (int k = 0; k < c.levels(); ++k) {
    out << (c.deg_min + k) << ":";
    for (int v : c.summands[k]) out << " " << alg.vertex_name(v);
    out << "\n";
  }
  for (size_t k = 0; k < c.diffs.size(); ++k) {
    const PathMat& m = c.diffs[k];
    for (int r = 0; r < m.rows; ++r)
      for (int s = 0; s < m.cols; ++s) {
        const AlgElem& e = m.at(r, s);
        if (e.zero()) continue;
        out << "d " << (c.deg_min + static_cast<int>(k) + 1) << " " << r << " " << s << " ";
        bool first = true;
        for (const auto& [p, coeff] : e.terms) {
          if (!first) out << "+";
          first = false;
          if (coeff != 1) out << coeff << "*";
          if (p.empty())
            out << "1";
          else
            for (size_t i = 0; i < p.size(); ++i) out << (i ? "." : "") << alg.arrow_name(p[i]);
        }
        out << "\n";
      }
  }
  return out.str();
}

// --- construction from words -----------------------------------------------------------

namespace {

// Shared by the string and band builders: place nodes with gradings and add
// one differential component per letter.
ProjComplex build_from_nodes(const GentleAlgebra& alg, const PrimeField& F,
                             const std::vector<int>& node_vertex, const std::vector<int>& node_deg,
                             const std::vector<std::tuple<int, int, Letter, int>>& components) {
  // components: (node_before, node_after, letter, scalar)
  ProjComplex c;
  if (node_vertex.empty()) return c;
  int lo = *std::min_element(node_deg.begin(), node_deg.end());
  int hi = *std::max_element(node_deg.begin(), node_deg.end());
  c.deg_min = lo;
  c.summands.assign(hi - lo + 1, {});
  // Position of each node within its level.
  std::vector<int> pos(node_vertex.size());
  for (size_t i = 0; i < node_vertex.size(); ++i) {
    std::vector<int>& lvl = c.summands[node_deg[i] - lo];
    pos[i] = static_cast<int>(lvl.size());
    lvl.push_back(node_vertex[i]);
  }
  c.diffs.clear();
  for (int k = 0; k + 1 < c.levels(); ++k)
    c.diffs.push_back(PathMat(static_cast<int>(c.summands[k].size()),
                              static_cast<int>(c.summands[k + 1].size())));
  for (const auto& [nb, na, letter, scalar] : components) {
    // A direct letter maps P_{node_after} -> P_{node_before} (degree drops by
    // one); an inverse letter maps P_{node_before} -> P_{node_after}.
    int src_node = letter.inverse ? nb : na;   // higher degree
    int dst_node = letter.inverse ? na : nb;   // lower degree
    int k = node_deg[dst_node] - lo;           // differential into level k
    PathMat& m = c.diffs[k];
    AlgElem add = elem_path(letter.path.arrows, F.norm(scalar));
    m.at(pos[dst_node], pos[src_node]) = elem_add(F, m.at(pos[dst_node], pos[src_node]), add);
  }
  trim(c);
  return c;
}

}  // namespace

ProjComplex string_to_complex(const GentleAlgebra& alg, const PrimeField& F, const GradedString& s) {
  if (s.empty()) {
    ProjComplex c;
    c.deg_min = s.base;
    c.summands = {{s.basepoint}};
    return c;
  }
  int n = static_cast<int>(s.letters.size());
  std::vector<int> node_vertex(n + 1), node_deg = grade_word(s.letters, s.base);
  node_vertex[0] = s.letters[0].node_before(alg);
  for (int i = 0; i < n; ++i) node_vertex[i + 1] = s.letters[i].node_after(alg);
  std::vector<std::tuple<int, int, Letter, int>> comps;
  for (int i = 0; i < n; ++i) comps.push_back({i, i + 1, s.letters[i], 1});
  return build_from_nodes(alg, F, node_vertex, node_deg, comps);
}

ProjComplex band_to_complex(const GentleAlgebra& alg, const PrimeField& F, const GradedBand& b) {
  if (b.dimension != 1)
    throw std::invalid_argument("band dimension > 1: normalize_band first (thick-equal by the tube filtration)");
  return band_complex_r(alg, F, b, 1);
}

ProjComplex band_complex_r(const GentleAlgebra& alg, const PrimeField& F, const GradedBand& b, int r) {
  if (F.norm(b.scalar) == 0) throw std::invalid_argument("band scalar must be a unit");
  if (r < 1) throw std::invalid_argument("band dimension must be positive");
  int n = static_cast<int>(b.letters.size());
  std::vector<int> grading = grade_word(b.letters, b.base);
  if (grading.back() != grading.front()) throw std::invalid_argument("ungraded cyclic word");
  // r copies of each of the n cyclic nodes; node (i, j) = copy j of node i.
  std::vector<int> node_vertex, node_deg;
  auto id = [&](int i, int j) { return (i % n) * r + j; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < r; ++j) {
      node_vertex.push_back(b.letters[i].node_before(alg));
      node_deg.push_back(grading[i]);
    }
  std::vector<std::tuple<int, int, Letter, int>> comps;
  int lambda = F.norm(b.scalar);
  for (int i = 0; i < n; ++i) {
    // Component of letter i connects cyclic nodes i and i+1.  The designated
    // component carries the Jordan block J_r(lambda); the n=2 word places
    // lambda on sigma_1 so the single differential reads lambda*s1 + s2.
    bool designated = (n == 2) ? (i == 0) : (i == n - 1);
    for (int j = 0; j < r; ++j) {
      int scale = designated ? lambda : 1;
      comps.push_back({id(i, j), id(i + 1, j), b.letters[i], scale});
      if (designated && j + 1 < r) comps.push_back({id(i, j), id(i + 1, j + 1), b.letters[i], 1});
    }
  }
  return build_from_nodes(alg, F, node_vertex, node_deg, comps);
}

// --- cones and minimal models -------------------------------------------------------------

bool commutes(const GentleAlgebra& alg, const PrimeField& F, const ProjComplex& a,
              const ProjComplex& b, const ChainMap& f) {
  // d_B . f = f . d_A on every degree.
  for (int d = std::min(a.deg_min, b.deg_min) - 1; d <= std::max(a.deg_max(), b.deg_max()) + 1; ++d) {
    int ka = a.level_of(d);
    if (ka < 0 || a.summands[ka].empty()) continue;
    int kb1 = b.level_of(d - 1);
    int rows = (kb1 >= 0) ? static_cast<int>(b.summands[kb1].size()) : 0;
    for (int r = 0; r < rows; ++r)
      for (int s = 0; s < static_cast<int>(a.summands[ka].size()); ++s) {
        AlgElem acc;
        int kb = b.level_of(d);
        if (kb >= 0 && f.comps.count(d) && kb1 >= 0 && kb1 < static_cast<int>(b.diffs.size())) {
          const PathMat& fd = f.comps.at(d);
          for (int t = 0; t < static_cast<int>(b.summands[kb].size()); ++t)
            acc = elem_add(F, acc, elem_compose(alg, F, b.diffs[kb1].at(r, t), fd.at(t, s)));
        }
        int ka1 = a.level_of(d - 1);
        if (ka1 >= 0 && f.comps.count(d - 1) && ka1 < static_cast<int>(a.diffs.size())) {
          const PathMat& fd1 = f.comps.at(d - 1);
          for (int u = 0; u < static_cast<int>(a.summands[ka1].size()); ++u)
            acc = elem_add(F, acc,
                           elem_neg(F, elem_compose(alg, F, fd1.at(r, u), a.diffs[ka1].at(u, s))));
        }
        if (!acc.zero()) return false;
      }
  }
  return true;
}

ProjComplex mapping_cone_raw(const GentleAlgebra& alg, const PrimeField& F, const ProjComplex& a,
                             const ProjComplex& b, const ChainMap& f) {
  if (!commutes(alg, F, a, b, f)) throw std::invalid_argument("mapping cone of a non-chain-map");
  ProjComplex a1 = shift(a, 1, F);
  ProjComplex out = direct_sum(b, a1, F);
  // direct_sum laid B first within each level; add the off-diagonal block
  // f_{i-1}: A^{i-1} (inside C^i) -> B^{i-1} (inside C^{i-1}).
  for (int k = 0; k + 1 < out.levels(); ++k) {
    int d = out.deg_min + k + 1;  // source degree of diffs[k]
    int ka = a1.level_of(d);      // A[1]^d = A^{d-1}
    int kb = b.level_of(d - 1);
    if (ka < 0 || kb < 0) continue;
    if (!f.comps.count(d - 1)) continue;
    const PathMat& fm = f.comps.at(d - 1);
    int b_rows_target = b.level_of(d - 1) >= 0 ? static_cast<int>(b.summands[kb].size()) : 0;
    int b_cols_src = b.level_of(d) >= 0 ? static_cast<int>(b.summands[b.level_of(d)].size()) : 0;
    for (int r = 0; r < b_rows_target; ++r)
      for (int s = 0; s < static_cast<int>(a1.summands[ka].size()); ++s)
        out.diffs[k].at(r, b_cols_src + s) =
            elem_add(F, out.diffs[k].at(r, b_cols_src + s), fm.at(r, s));
  }
  return out;
}

ProjComplex minimalize(const GentleAlgebra& alg, const PrimeField& F, ProjComplex c) {
  for (;;) {
    // Find a unit entry: nonzero trivial-path coefficient.
    int pk = -1, pr = -1, pc = -1;
    for (size_t k = 0; k < c.diffs.size() && pk < 0; ++k) {
      const PathMat& m = c.diffs[k];
      for (int r = 0; r < m.rows && pk < 0; ++r)
        for (int s = 0; s < m.cols; ++s)
          if (m.at(r, s).trivial_coeff() != 0) {
            pk = static_cast<int>(k);
            pr = r;
            pc = s;
            break;
          }
    }
    if (pk < 0) break;
    PathMat& m = c.diffs[pk];
    AlgElem alpha_inv = elem_inverse(alg, F, m.at(pr, pc));
    // Schur complement on the remaining rows/columns of this differential.
    for (int r = 0; r < m.rows; ++r) {
      if (r == pr) continue;
      if (m.at(r, pc).zero()) continue;
      AlgElem left = elem_compose(alg, F, m.at(r, pc), alpha_inv);
      for (int s = 0; s < m.cols; ++s) {
        if (s == pc) continue;
        if (m.at(pr, s).zero()) continue;
        m.at(r, s) = elem_add(F, m.at(r, s), elem_neg(F, elem_compose(alg, F, left, m.at(pr, s))));
      }
    }
    // Remove column pc (level pk+1 summand) and row pr (level pk summand).
    auto drop_col = [](PathMat& mm, int col) {
      PathMat out(mm.rows, mm.cols - 1);
      for (int r = 0; r < mm.rows; ++r)
        for (int s = 0, t = 0; s < mm.cols; ++s)
          if (s != col) out.at(r, t++) = std::move(mm.at(r, s));
      mm = std::move(out);
    };
    auto drop_row = [](PathMat& mm, int row) {
      PathMat out(mm.rows - 1, mm.cols);
      for (int r = 0, t = 0; r < mm.rows; ++r) {
        if (r == row) continue;
        for (int s = 0; s < mm.cols; ++s) out.at(t, s) = std::move(mm.at(r, s));
        ++t;
      }
      mm = std::move(out);
    };
    drop_col(c.diffs[pk], pc);
    drop_row(c.diffs[pk], pr);
    c.summands[pk + 1].erase(c.summands[pk + 1].begin() + pc);
    c.summands[pk].erase(c.summands[pk].begin() + pr);
    if (pk + 1 < static_cast<int>(c.diffs.size())) drop_row(c.diffs[pk + 1], pc);
    if (pk - 1 >= 0) drop_col(c.diffs[pk - 1], pr);
  }
  trim(c);
  return c;
}

}  // namespace gentle
