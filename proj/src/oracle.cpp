#include "gentle/oracle.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <stdexcept>

namespace gentle {

Oracle::Oracle(const GentleAlgebra& alg_, int field_order) : alg(alg_), F(field_order) {
  if (alg.perm_succ.empty() && alg.num_arrows() > 0)
    throw std::invalid_argument("oracle requires a gentle algebra (tables missing)");
}

const std::vector<Path>& Oracle::paths_between(int v, int u) {
  auto key = std::make_pair(v, u);
  auto it = path_cache_.find(key);
  if (it == path_cache_.end()) it = path_cache_.emplace(key, permitted_paths(alg, v, u)).first;
  return it->second;
}

// --- slot spaces -------------------------------------------------------------------

Oracle::SlotSpace Oracle::slot_space(const ProjComplex& A, const ProjComplex& B, int t) {
  SlotSpace out;
  for (int ka = 0; ka < A.levels(); ++ka) {
    int i = A.deg_min + ka;
    int kb = B.level_of(i + t);
    if (kb < 0) continue;
    const std::vector<int>& acol = A.summands[ka];
    const std::vector<int>& brow = B.summands[kb];
    for (int r = 0; r < static_cast<int>(brow.size()); ++r)
      for (int c = 0; c < static_cast<int>(acol.size()); ++c)
        for (const Path& p : paths_between(brow[r], acol[c])) {
          Slot s{i, r, c, p.arrows};
          out.index[s] = static_cast<int>(out.slots.size());
          out.slots.push_back(std::move(s));
        }
  }
  return out;
}

namespace {

// The differential of C from degree d to d-1, or nullptr.
const PathMat* diff_from(const ProjComplex& c, int d) {
  int k = c.level_of(d - 1);
  if (k < 0 || k >= static_cast<int>(c.diffs.size())) return nullptr;
  if (c.level_of(d) != k + 1) return nullptr;
  return &c.diffs[k];
}

}  // namespace

FpMat Oracle::chain_condition(const ProjComplex& A, const ProjComplex& B, const SlotSpace& f_space) {
  SlotSpace cons = slot_space(A, B, -1);
  FpMat m(cons.dim(), f_space.dim());
  for (int col = 0; col < f_space.dim(); ++col) {
    const Slot& s = f_space.slots[col];
    AlgElem pi = elem_path(s.path, 1);
    // d_B . f_i lands in the degree-i condition block.
    if (const PathMat* dB = diff_from(B, s.i)) {
      for (int r2 = 0; r2 < dB->rows; ++r2) {
        AlgElem e = elem_compose(alg, F, dB->at(r2, s.r), pi);
        for (const auto& [rho, coeff] : e.terms) {
          int row = cons.find({s.i, r2, s.c, rho});
          assert(row >= 0);
          m.at(row, col) = F.add(m.at(row, col), coeff);
        }
      }
    }
    // -f_i . d_A lands in the degree-(i+1) condition block.
    if (const PathMat* dA = diff_from(A, s.i + 1)) {
      for (int c2 = 0; c2 < dA->cols; ++c2) {
        AlgElem e = elem_compose(alg, F, pi, dA->at(s.c, c2));
        for (const auto& [rho, coeff] : e.terms) {
          int row = cons.find({s.i + 1, s.r, c2, rho});
          assert(row >= 0);
          m.at(row, col) = F.sub(m.at(row, col), coeff);
        }
      }
    }
  }
  return m;
}

FpMat Oracle::homotopy_assembly(const ProjComplex& A, const ProjComplex& B,
                                const SlotSpace& f_space, const SlotSpace& h_space) {
  FpMat m(f_space.dim(), h_space.dim());
  for (int col = 0; col < h_space.dim(); ++col) {
    const Slot& s = h_space.slots[col];  // h_i: A^i -> B^{i+1}
    AlgElem pi = elem_path(s.path, 1);
    if (const PathMat* dB = diff_from(B, s.i + 1)) {
      for (int r2 = 0; r2 < dB->rows; ++r2) {
        AlgElem e = elem_compose(alg, F, dB->at(r2, s.r), pi);
        for (const auto& [rho, coeff] : e.terms) {
          int row = f_space.find({s.i, r2, s.c, rho});
          if (row >= 0) m.at(row, col) = F.add(m.at(row, col), coeff);
        }
      }
    }
    if (const PathMat* dA = diff_from(A, s.i + 1)) {
      for (int c2 = 0; c2 < dA->cols; ++c2) {
        AlgElem e = elem_compose(alg, F, pi, dA->at(s.c, c2));
        for (const auto& [rho, coeff] : e.terms) {
          int row = f_space.find({s.i + 1, s.r, c2, rho});
          if (row >= 0) m.at(row, col) = F.add(m.at(row, col), coeff);
        }
      }
    }
  }
  return m;
}

ChainMap Oracle::materialize(const ProjComplex& A, const ProjComplex& B, const SlotSpace& f_space,
                             const std::vector<int>& vec) {
  ChainMap f;
  for (int j = 0; j < f_space.dim(); ++j) {
    if (vec[j] == 0) continue;
    const Slot& s = f_space.slots[j];
    if (!f.comps.count(s.i)) {
      int rows = static_cast<int>(B.summands[B.level_of(s.i)].size());
      int cols = static_cast<int>(A.summands[A.level_of(s.i)].size());
      f.comps[s.i] = PathMat(rows, cols);
    }
    PathMat& m = f.comps[s.i];
    m.at(s.r, s.c) = elem_add(F, m.at(s.r, s.c), elem_path(s.path, vec[j]));
  }
  return f;
}

std::vector<int> Oracle::flatten(const ProjComplex& A, const ProjComplex& B,
                                 const SlotSpace& f_space, const ChainMap& f) {
  std::vector<int> v(f_space.dim(), 0);
  for (const auto& [i, m] : f.comps)
    for (int r = 0; r < m.rows; ++r)
      for (int c = 0; c < m.cols; ++c)
        for (const auto& [p, coeff] : m.at(r, c).terms) {
          int j = f_space.find({i, r, c, p});
          if (j < 0) throw std::logic_error("chain map outside slot space");
          v[j] = F.add(v[j], coeff);
        }
  return v;
}

ChainMap Oracle::compose(const ProjComplex& A, const ProjComplex& B, const ProjComplex& C,
                         const ChainMap& f, const ChainMap& g) {
  ChainMap out;
  for (const auto& [i, fm] : f.comps) {
    auto it = g.comps.find(i);
    if (it == g.comps.end()) continue;
    const PathMat& gm = it->second;
    PathMat m(gm.rows, fm.cols);
    bool nonzero = false;
    for (int r = 0; r < gm.rows; ++r)
      for (int c = 0; c < fm.cols; ++c) {
        AlgElem acc;
        for (int t = 0; t < fm.rows; ++t)
          acc = elem_add(F, acc, elem_compose(alg, F, gm.at(r, t), fm.at(t, c)));
        if (!acc.zero()) nonzero = true;
        m.at(r, c) = std::move(acc);
      }
    if (nonzero) out.comps[i] = std::move(m);
  }
  (void)C;
  return out;
}

// --- hom spaces ----------------------------------------------------------------------

int Oracle::hom0_impl(const ProjComplex& A, const ProjComplex& B) {
  SlotSpace f_space = slot_space(A, B, 0);
  if (f_space.dim() == 0) return 0;
  FpMat phi = chain_condition(A, B, f_space);
  int nullity = f_space.dim() - rank(F, phi);
  SlotSpace h_space = slot_space(A, B, 1);
  FpMat psi = homotopy_assembly(A, B, f_space, h_space);
  return nullity - rank(F, psi);
}

int Oracle::hom0(const ProjComplex& A, const ProjComplex& B) {
  if (A.zero() || B.zero()) return 0;
  auto key = std::make_pair(complex_key(alg, A), complex_key(alg, B));
  auto it = hom0_cache_.find(key);
  if (it != hom0_cache_.end()) return it->second;
  int dim = hom0_impl(A, B);
  hom0_cache_[key] = dim;
  return dim;
}

HomTable Oracle::hom_table(const ProjComplex& A, const ProjComplex& B) {
  HomTable t;
  if (A.zero() || B.zero()) return t;
  // hom(A, B[k]) can be nonzero only when the shifted supports overlap.
  int lo = A.deg_min - B.deg_max() - 1, hi = A.deg_max() - B.deg_min + 1;
  for (int k = lo; k <= hi; ++k) {
    int d = hom0(A, shift(B, k, F));
    if (d != 0) t.dims[k] = d;
    t.total += d;
  }
  return t;
}

std::vector<ChainMap> Oracle::hom_basis(const ProjComplex& A, const ProjComplex& B) {
  std::vector<ChainMap> out;
  if (A.zero() || B.zero()) return out;
  SlotSpace f_space = slot_space(A, B, 0);
  if (f_space.dim() == 0) return out;
  FpMat phi = chain_condition(A, B, f_space);
  std::vector<std::vector<int>> null = nullspace(F, phi);
  SlotSpace h_space = slot_space(A, B, 1);
  FpMat psi = homotopy_assembly(A, B, f_space, h_space);
  Span h_span(F, f_space.dim());
  for (int c = 0; c < psi.cols; ++c) {
    std::vector<int> col(psi.rows);
    for (int r = 0; r < psi.rows; ++r) col[r] = psi.at(r, c);
    h_span.insert(std::move(col));
  }
  for (const std::vector<int>& v : null)
    if (h_span.insert(v)) out.push_back(materialize(A, B, f_space, v));
  return out;
}

ProjComplex Oracle::cone(const ProjComplex& A, const ProjComplex& B, const ChainMap& f) {
  return minimalize(alg, F, mapping_cone_raw(alg, F, A, B, f));
}

// --- decomposability ---------------------------------------------------------------------

IndecResult Oracle::is_indecomposable(const ProjComplex& A) {
  IndecResult res;
  if (A.zero()) {
    res.status = Decide::no;
    res.note = "zero complex";
    return res;
  }
  SlotSpace f_space = slot_space(A, A, 0);
  FpMat phi = chain_condition(A, A, f_space);
  std::vector<std::vector<int>> null = nullspace(F, phi);
  SlotSpace h_space = slot_space(A, A, 1);
  FpMat psi = homotopy_assembly(A, A, f_space, h_space);
  Span h_only(F, f_space.dim());
  for (int c = 0; c < psi.cols; ++c) {
    std::vector<int> col(psi.rows);
    for (int r = 0; r < psi.rows; ++r) col[r] = psi.at(r, c);
    h_only.insert(std::move(col));
  }
  Span both = h_only;
  std::vector<std::vector<int>> reps;
  for (const std::vector<int>& v : null)
    if (both.insert(v)) reps.push_back(v);
  int n = static_cast<int>(reps.size());
  if (n == 1) {
    res.status = Decide::yes;
    return res;
  }
  if (n == 0) {
    // End = 0 can only happen for the zero object.
    res.status = Decide::no;
    res.note = "trivial endomorphism ring";
    return res;
  }
  if (n > idempotent_dim_bound) {
    res.status = Decide::undecided;
    res.note = "endomorphism dimension " + std::to_string(n) + " exceeds bound";
    return res;
  }
  long long count = 1;
  for (int i = 0; i < n; ++i) {
    count *= F.p;
    if (count > (1 << 22)) {
      res.status = Decide::undecided;
      res.note = "idempotent search space too large";
      return res;
    }
  }
  // Coordinates of a chain map's class: residue against homotopies, then
  // solve against the residues of the representatives.
  std::vector<std::vector<int>> rep_res;
  for (const auto& r : reps) rep_res.push_back(h_only.residue(r));
  auto coords = [&](const std::vector<int>& vec) {
    std::vector<int> target = h_only.residue(vec);
    // Solve sum x_j rep_res[j] = target by Gaussian elimination.
    FpMat m(f_space.dim(), n + 1);
    for (int j = 0; j < n; ++j)
      for (int r = 0; r < f_space.dim(); ++r) m.at(r, j) = rep_res[j][r];
    for (int r = 0; r < f_space.dim(); ++r) m.at(r, n) = target[r];
    std::vector<int> piv = rref(F, m);
    std::vector<int> x(n, 0);
    for (size_t r = 0; r < piv.size(); ++r) {
      if (piv[r] == n) throw std::logic_error("class coordinates: inconsistent system");
      x[piv[r]] = m.at(static_cast<int>(r), n);
    }
    return x;
  };
  std::vector<ChainMap> rep_maps;
  for (const auto& r : reps) rep_maps.push_back(materialize(A, A, f_space, r));
  // Structure constants c[j][k] = class of rep_j . rep_k.
  std::vector<std::vector<std::vector<int>>> sc(n, std::vector<std::vector<int>>(n));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      ChainMap comp = compose(A, A, A, rep_maps[k], rep_maps[j]);
      sc[j][k] = coords(flatten(A, A, f_space, comp));
    }
  // Identity coordinates.
  ChainMap id;
  for (int lvl = 0; lvl < A.levels(); ++lvl) {
    int sz = static_cast<int>(A.summands[lvl].size());
    if (sz == 0) continue;
    PathMat m(sz, sz);
    for (int r = 0; r < sz; ++r) m.at(r, r) = elem_path({}, 1);
    id.comps[A.deg_min + lvl] = std::move(m);
  }
  std::vector<int> id_coords = coords(flatten(A, A, f_space, id));
  // Brute-force idempotent search.
  std::vector<int> e(n, 0);
  std::function<bool(int)> scan = [&](int pos) -> bool {
    if (pos == n) {
      bool all_zero = true, is_id = true;
      for (int j = 0; j < n; ++j) {
        if (e[j] != 0) all_zero = false;
        if (e[j] != id_coords[j]) is_id = false;
      }
      if (all_zero || is_id) return false;
      std::vector<int> sq(n, 0);
      for (int j = 0; j < n; ++j) {
        if (e[j] == 0) continue;
        for (int k = 0; k < n; ++k) {
          if (e[k] == 0) continue;
          int f_jk = F.mul(e[j], e[k]);
          for (int m2 = 0; m2 < n; ++m2) sq[m2] = F.add(sq[m2], F.mul(f_jk, sc[j][k][m2]));
        }
      }
      return sq == e;
    }
    for (int v = 0; v < F.p; ++v) {
      e[pos] = v;
      if (scan(pos + 1)) return true;
    }
    e[pos] = 0;
    return false;
  };
  if (scan(0)) {
    res.status = Decide::no;
    std::string s = "idempotent (";
    for (int j = 0; j < n; ++j) s += (j ? "," : "") + std::to_string(e[j]);
    res.note = s + ") in class basis";
  } else {
    res.status = Decide::yes;
  }
  return res;
}

// --- fingerprints ---------------------------------------------------------------------------

void Oracle::configure_family(int family_letters) {
  family_words_ = enumerate_strings(alg, family_letters);
  family_.clear();
  for (const GradedString& s : family_words_) family_.push_back(of_string(s));
  fp_cache_.clear();
}

const Fingerprint& Oracle::fingerprint(const ProjComplex& A) {
  if (family_.empty()) configure_family(4);
  std::string key = complex_key(alg, A);
  auto it = fp_cache_.find(key);
  if (it != fp_cache_.end()) return it->second;
  // The fingerprint is cached as a whole, so the per-pair hom0 cache (and its
  // string keys) is skipped here.
  Fingerprint fp;
  if (!A.zero()) {
    int glo = 0, ghi = 0;
    for (const ProjComplex& T : family_) {
      glo = std::min(glo, T.deg_min - A.deg_max() - 1);
      ghi = std::max(ghi, T.deg_max() - A.deg_min + 1);
    }
    for (int k = glo; k <= ghi; ++k) {
      ProjComplex Ak = shift(A, k, F);
      for (size_t t = 0; t < family_.size(); ++t) {
        const ProjComplex& T = family_[t];
        if (k < T.deg_min - A.deg_max() - 1 || k > T.deg_max() - A.deg_min + 1) continue;
        int d = hom0_impl(T, Ak);
        if (d != 0) fp[{static_cast<int>(t), k}] = d;
      }
    }
  }
  return fp_cache_.emplace(std::move(key), std::move(fp)).first->second;
}

std::optional<int> Oracle::fp_match_shift(const ProjComplex& A, const ProjComplex& B, int max_shift) {
  Fingerprint fa = fingerprint(A);  // copies: fingerprint() may rehash the cache
  Fingerprint fb = fingerprint(B);
  auto matches_at = [&](int j) {
    // fingerprint(shift(B, j)) at (t, k) equals fb at (t, k + j).
    if (fa.size() != fb.size()) return false;
    for (const auto& [tk, d] : fa) {
      auto it = fb.find({tk.first, tk.second + j});
      if (it == fb.end() || it->second != d) return false;
    }
    return true;
  };
  for (int m = 0; m <= max_shift; ++m)
    for (int j : {m, -m}) {
      if (matches_at(j)) return j;
      if (m == 0) break;
    }
  return std::nullopt;
}

// --- builders ----------------------------------------------------------------------------------

ProjComplex Oracle::of_string(const GradedString& s) { return string_to_complex(alg, F, s); }
ProjComplex Oracle::of_band(const GradedBand& b) { return band_to_complex(alg, F, b); }

// --- powers and stabilization ----------------------------------------------------------------

GradedString Oracle::power(const GradedString& s, int i) {
  if (i < 1) throw std::invalid_argument("power exponent must be positive");
  if (s.empty()) throw std::invalid_argument("power of a lazy string");
  Word acc = s.letters;
  for (int j = 1; j < i; ++j) {
    Word cat = acc;
    cat.insert(cat.end(), s.letters.begin(), s.letters.end());
    std::optional<Word> red = reduce_word(alg, cat);
    if (!red || !validate_string(alg, *red).empty())
      throw std::runtime_error("string does not self-concatenate (is it closed?)");
    acc = std::move(*red);
  }
  return GradedString{acc, 0, -1};
}

Oracle::PowerDecomposition Oracle::power_decomposition(const GradedString& s) {
  Word p1 = s.letters, p2 = power(s, 2).letters, p3 = power(s, 3).letters;
  int sigma_len = static_cast<int>(p2.size()) - static_cast<int>(p1.size());
  if (sigma_len <= 0) throw std::runtime_error("power words do not grow: no loop decomposition");
  for (size_t a = 0; a + 0 <= p1.size(); ++a) {
    PowerDecomposition d;
    d.prefix.assign(p1.begin(), p1.begin() + a);
    d.suffix.assign(p1.begin() + a, p1.end());
    if (a + sigma_len > p2.size()) break;
    d.loop.assign(p2.begin() + a, p2.begin() + a + sigma_len);
    auto build = [&](int reps) {
      Word w = d.prefix;
      for (int j = 0; j < reps; ++j) w.insert(w.end(), d.loop.begin(), d.loop.end());
      w.insert(w.end(), d.suffix.begin(), d.suffix.end());
      return w;
    };
    if (build(1) == p2 && build(2) == p3) return d;
  }
  throw std::runtime_error("no prefix/loop/suffix decomposition found");
}

Oracle::StabilizationReport Oracle::stabilization_check(const GradedString& s, const ProjComplex& P,
                                                        int i_max) {
  StabilizationReport rep;
  for (int i = 1; i <= i_max; ++i) rep.totals.push_back(hom_table(of_string(power(s, i)), P).total);
  // Judge the tail: differences from the midpoint onwards.
  std::vector<int> diffs;
  for (size_t i = rep.totals.size() / 2; i + 1 < rep.totals.size(); ++i)
    diffs.push_back(rep.totals[i + 1] - rep.totals[i]);
  if (diffs.empty()) return rep;
  bool same = std::all_of(diffs.begin(), diffs.end(), [&](int d) { return d == diffs[0]; });
  if (same && diffs[0] == 0)
    rep.kind = StabilizationReport::Kind::constant;
  else if (same && diffs[0] > 0) {
    rep.kind = StabilizationReport::Kind::increasing;
    rep.slope = diffs[0];
  }
  return rep;
}

}  // namespace gentle
