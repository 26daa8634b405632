#include "gentle/arcs.hpp"

#include <algorithm>
#include <climits>
#include <set>
#include <tuple>

namespace gentle {

namespace {

int left_vertex(const GentleAlgebra& alg, const GradedString& s) {
  return s.empty() ? s.basepoint : s.letters.front().node_before(alg);
}
int right_vertex(const GentleAlgebra& alg, const GradedString& s) {
  return s.empty() ? s.basepoint : s.letters.back().node_after(alg);
}

// Orient so the chosen end comes last (for the left factor of a gluing).
Word end_last(const GradedString& s, int end) {
  if (s.empty()) return {};
  return end == 1 ? s.letters : inverse_word(s.letters);
}
// Orient so the chosen end comes first (for the right factor).
Word end_first(const GradedString& s, int end) {
  if (s.empty()) return {};
  return end == 0 ? s.letters : inverse_word(s.letters);
}

Word concat(const Word& a, const Word& b) {
  Word r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

// fingerprint(shift(A, j)) translates every (family, k) entry to (family, k + j).
Fingerprint fp_translate(const Fingerprint& fp, int j) {
  if (j == 0) return fp;
  Fingerprint out;
  for (const auto& [tk, d] : fp) out[{tk.first, tk.second + j}] = d;
  return out;
}

bool fp_equal_up_to_shift(const Fingerprint& a, const Fingerprint& b, int* shift_out = nullptr,
                          int max_shift = 8) {
  for (int j = 0; j <= max_shift; ++j)
    for (int sgn : {1, -1}) {
      int k = sgn * j;
      if (j == 0 && sgn < 0) continue;
      if (fp_translate(a, k) == b) {
        if (shift_out) *shift_out = k;
        return true;
      }
    }
  return false;
}

// A cut position inside a word: before letter `i`, or `off` arrows into the
// traversal of letter `i` (0 < off < letter length).
struct Cut {
  int i = 0, off = 0;
  bool operator<(const Cut& o) const { return std::tie(i, off) < std::tie(o.i, o.off); }
  bool operator==(const Cut& o) const { return i == o.i && off == o.off; }
};

// The [from, to) traversal slice of a letter as a letter of its own.
Letter letter_slice(const Letter& l, int from, int to) {
  int m = l.path.length();
  Letter out;
  out.inverse = l.inverse;
  if (!l.inverse) {
    out.path.arrows.assign(l.path.arrows.begin() + from, l.path.arrows.begin() + to);
  } else {
    // Inverse letters traverse the path backwards.
    out.path.arrows.assign(l.path.arrows.begin() + (m - to), l.path.arrows.begin() + (m - from));
  }
  return out;
}

std::vector<Cut> all_cuts(const Word& w) {
  std::vector<Cut> cuts;
  for (int i = 0; i <= static_cast<int>(w.size()); ++i) {
    cuts.push_back({i, 0});
    if (i < static_cast<int>(w.size()))
      for (int off = 1; off < w[i].path.length(); ++off) cuts.push_back({i, off});
  }
  return cuts;
}

// The subword strictly between two cuts (partial boundary letters included).
Word subword(const Word& w, const Cut& a, const Cut& b) {
  Word out;
  if (a.i == b.i && a.off > 0 && b.off > 0) {
    if (b.off > a.off) out.push_back(letter_slice(w[a.i], a.off, b.off));
    return out;
  }
  int start = a.i;
  if (a.off > 0) {
    out.push_back(letter_slice(w[a.i], a.off, w[a.i].path.length()));
    start = a.i + 1;
  }
  for (int i = start; i < b.i; ++i) out.push_back(w[i]);
  if (b.off > 0) out.push_back(letter_slice(w[b.i], 0, b.off));
  return out;
}

Word word_prefix(const Word& w, const Cut& c) { return subword(w, {0, 0}, c); }
Word word_suffix(const Word& w, const Cut& c) {
  return subword(w, c, {static_cast<int>(w.size()), 0});
}

int word_left_vertex(const GentleAlgebra& alg, const Word& w, int fallback) {
  return w.empty() ? fallback : w.front().node_before(alg);
}
int word_right_vertex(const GentleAlgebra& alg, const Word& w, int fallback) {
  return w.empty() ? fallback : w.back().node_after(alg);
}

}  // namespace

ArcModel::ArcModel(const GentleAlgebra& a, int field_order) : alg(a), oracle(a, field_order) {}

std::string ArcModel::key(const GradedString& s) {
  return format_string(alg, canonical_string(alg, s));
}

Arc ArcModel::classify_arc(const GradedString& s) {
  GradedString canon = canonical_string(alg, s);
  std::string k = format_string(alg, canon);
  auto it = classify_cache_.find(k);
  if (it != classify_cache_.end()) return it->second;

  ProjComplex x = oracle.of_string(canon);
  int total = oracle.hom_table(x, x).total;
  Arc arc;
  arc.string = canon;
  arc.self_hom = total;
  // The crossing count (total - e)/2 forces e by parity: open arcs carry one
  // endpoint self-morphism (the identity), closed arcs two.
  arc.closed = (total % 2 == 0);
  arc.self_crossings = (total - (arc.closed ? 2 : 1)) / 2;
  arc.kind = total == 1   ? ArcKind::exceptional
             : total == 2 ? ArcKind::spherelike
                          : ArcKind::crossing;
  classify_cache_[k] = arc;
  return arc;
}

std::vector<GradedString> ArcModel::glue_candidates(const GradedString& s, int s_end,
                                                    const GradedString& t, int t_end) {
  Word u = end_last(s, s_end);
  Word w = end_first(t, t_end);
  int u_start = s.empty() ? s.basepoint : u.front().node_before(alg);
  int u_end = s.empty() ? s.basepoint : u.back().node_after(alg);
  int w_start = t.empty() ? t.basepoint : w.front().node_before(alg);
  int w_end = t.empty() ? t.basepoint : w.back().node_after(alg);

  std::vector<Word> raw;
  auto push = [&](Word cand) { raw.push_back(std::move(cand)); };

  if (!u.empty() && !w.empty()) {
    if (u_end == w_start) push(concat(u, w));
    for (const Letter& l : all_letters(alg))
      if (l.node_before(alg) == u_end && l.node_after(alg) == w_start)
        push(concat(concat(u, {l}), w));
  } else if (!u.empty() && w.empty()) {
    // Gluing against a lazy arc is a boundary move at the end of u: extend by
    // one letter or (via reduction against an inverse) shorten.
    for (const Letter& l : all_letters(alg))
      if (l.node_before(alg) == u_end) push(concat(u, {l}));
  } else if (u.empty() && !w.empty()) {
    for (const Letter& l : all_letters(alg))
      if (l.node_after(alg) == w_start) push(concat({l}, w));
  } else {
    for (const Letter& l : all_letters(alg))
      if (l.node_before(alg) == u_start && l.node_after(alg) == w_start) push({l});
  }

  std::vector<GradedString> out;
  std::set<std::string> seen;
  for (Word& cand : raw) {
    int lv = word_left_vertex(alg, cand, -1), rv = word_right_vertex(alg, cand, -1);
    std::optional<Word> red = reduce_word(alg, std::move(cand));
    if (!red) continue;
    GradedString g;
    if (red->empty()) {
      if (lv != rv || lv < 0) continue;  // full cancellation keeps its endpoints
      g = GradedString{{}, 0, lv};
    } else {
      if (!validate_string(alg, *red).empty()) continue;
      g = GradedString{*red, 0, -1};
    }
    std::string k = key(g);
    if (seen.insert(k).second) out.push_back(std::move(g));
  }
  return out;
}

std::vector<Fingerprint> ArcModel::cone_fps_dir(const ProjComplex& x, const ProjComplex& y) {
  std::vector<Fingerprint> out;
  HomTable t = oracle.hom_table(x, y);
  for (const auto& [k, dim] : t.dims) {
    if (dim == 0) continue;
    ProjComplex yk = shift(y, k, oracle.F);
    for (const ChainMap& f : oracle.hom_basis(x, yk)) {
      ProjComplex c = oracle.cone(x, yk, f);
      if (c.zero()) continue;
      out.push_back(oracle.fingerprint(c));
    }
  }
  return out;
}

const std::vector<Fingerprint>& ArcModel::pair_cone_fps(const GradedString& s,
                                                        const GradedString& t) {
  std::string ka = key(s), kb = key(t);
  if (kb < ka) std::swap(ka, kb);
  std::string k = ka + "\x1f" + kb;
  auto it = pair_cache_.find(k);
  if (it != pair_cache_.end()) return it->second;

  ProjComplex x = oracle.of_string(canonical_string(alg, s));
  ProjComplex y = oracle.of_string(canonical_string(alg, t));
  std::vector<Fingerprint> fps = cone_fps_dir(x, y);
  std::vector<Fingerprint> rev = cone_fps_dir(y, x);
  fps.insert(fps.end(), rev.begin(), rev.end());
  return pair_cache_.emplace(k, std::move(fps)).first->second;
}

std::vector<GlueResult> ArcModel::glue(const GradedString& s, int s_end, const GradedString& t,
                                       int t_end) {
  std::string ck = format_string(alg, s) + "\x1f" + std::to_string(s_end) + "\x1f" +
                   format_string(alg, t) + "\x1f" + std::to_string(t_end);
  auto it = glue_cache_.find(ck);
  if (it != glue_cache_.end()) return it->second;

  std::vector<GlueResult> out;
  const std::vector<Fingerprint>& cones = pair_cone_fps(s, t);
  if (!cones.empty()) {
    for (const GradedString& cand : glue_candidates(s, s_end, t, t_end)) {
      const Fingerprint& fp = oracle.fingerprint(oracle.of_string(cand));
      for (const Fingerprint& cone_fp : cones) {
        int j = 0;
        if (fp_equal_up_to_shift(fp, cone_fp, &j)) {
          out.push_back({cand, j});
          break;
        }
      }
    }
  }
  glue_cache_[ck] = out;
  return out;
}

ArcModel::Intersections ArcModel::intersections(const Arc& a, const Arc& b) {
  Intersections res;
  if (key(a.string) == key(b.string)) return res;  // self: interior 0 by convention

  ProjComplex x = oracle.of_string(a.string);
  ProjComplex y = oracle.of_string(b.string);

  // Attribution targets: candidate words for every end pair.
  std::vector<std::pair<std::pair<int, int>, Fingerprint>> pair_fps;
  for (int ea = 0; ea < 2; ++ea)
    for (int eb = 0; eb < 2; ++eb)
      for (const GradedString& cand : glue_candidates(a.string, ea, b.string, eb))
        pair_fps.push_back({{ea, eb}, oracle.fingerprint(oracle.of_string(cand))});

  int interior_fwd = 0, interior_bwd = 0;
  for (int dir = 0; dir < 2; ++dir) {
    const ProjComplex& from = dir == 0 ? x : y;
    const ProjComplex& to = dir == 0 ? y : x;
    HomTable t = oracle.hom_table(from, to);
    for (const auto& [k, dim] : t.dims) {
      if (dim == 0) continue;
      ProjComplex tk = shift(to, k, oracle.F);
      for (const ChainMap& f : oracle.hom_basis(from, tk)) {
        ProjComplex c = oracle.cone(from, tk, f);
        if (c.zero()) continue;
        IndecResult ind = oracle.is_indecomposable(c);
        if (ind.status == Decide::undecided)
          throw ModelError("cone decomposability undecided between " + key(a.string) + " and " +
                           key(b.string) + ": " + ind.note);
        if (ind.status == Decide::no) {
          (dir == 0 ? interior_fwd : interior_bwd)++;
          continue;
        }
        // Endpoint-type: attribute to an end pair; record one direction only.
        if (dir == 0) {
          const Fingerprint& cfp = oracle.fingerprint(c);
          for (const auto& [ends, fp] : pair_fps)
            if (fp_equal_up_to_shift(fp, cfp)) {
              res.shared_endpoints.push_back(ends);
              break;
            }
        }
      }
    }
  }
  if (interior_fwd != interior_bwd)
    throw ModelError("unpaired interior-type morphisms between " + key(a.string) + " and " +
                     key(b.string) + " (" + std::to_string(interior_fwd) + " vs " +
                     std::to_string(interior_bwd) + ")");
  res.interior = interior_fwd;
  return res;
}

bool ArcModel::is_arc_collection(const std::vector<Arc>& arcs) {
  for (const Arc& a : arcs)
    if (a.kind == ArcKind::crossing) return false;
  for (size_t i = 0; i < arcs.size(); ++i)
    for (size_t j = i + 1; j < arcs.size(); ++j)
      if (intersections(arcs[i], arcs[j]).interior != 0) return false;
  return true;
}

bool ArcModel::is_connected(const std::vector<Arc>& arcs) {
  if (arcs.size() <= 1) return true;
  int n = static_cast<int>(arcs.size());
  std::vector<ProjComplex> cs;
  for (const Arc& a : arcs) cs.push_back(oracle.of_string(a.string));
  std::vector<int> comp(n, -1);
  std::vector<int> stack = {0};
  comp[0] = 0;
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    for (int j = 0; j < n; ++j) {
      if (comp[j] >= 0) continue;
      if (oracle.hom_table(cs[i], cs[j]).total != 0 || oracle.hom_table(cs[j], cs[i]).total != 0) {
        comp[j] = 0;
        stack.push_back(j);
      }
    }
  }
  return std::all_of(comp.begin(), comp.end(), [](int c) { return c == 0; });
}

ArcModel::MarkedPoints ArcModel::marked_points(const std::vector<Arc>& arcs) {
  int n = static_cast<int>(arcs.size());
  std::vector<std::vector<bool>> rel(2 * n, std::vector<bool>(2 * n, false));
  for (int x = 0; x < 2 * n; ++x)
    for (int y = x + 1; y < 2 * n; ++y) {
      bool g = !glue(arcs[x / 2].string, x % 2, arcs[y / 2].string, y % 2).empty();
      rel[x][y] = rel[y][x] = g;
    }
  // Greedy consistent clustering: merge two classes only when every cross
  // pair of their ends is gluable.
  std::vector<int> cls(2 * n);
  for (int x = 0; x < 2 * n; ++x) cls[x] = x;
  MarkedPoints mp;
  for (int x = 0; x < 2 * n; ++x)
    for (int y = x + 1; y < 2 * n; ++y) {
      if (!rel[x][y] || cls[x] == cls[y]) continue;
      bool ok = true;
      for (int u = 0; u < 2 * n && ok; ++u)
        for (int w = 0; w < 2 * n && ok; ++w)
          if (u != w && cls[u] == cls[x] && cls[w] == cls[y] && !rel[u][w]) ok = false;
      if (!ok) {
        mp.refused.push_back({x, y});
        continue;
      }
      int from = cls[y], to = cls[x];
      for (int u = 0; u < 2 * n; ++u)
        if (cls[u] == from) cls[u] = to;
    }
  mp.class_of.assign(2 * n, -1);
  std::vector<int> rep(2 * n, -1);
  for (int x = 0; x < 2 * n; ++x) {
    if (rep[cls[x]] < 0) rep[cls[x]] = mp.num_classes++;
    mp.class_of[x] = rep[cls[x]];
  }
  return mp;
}

namespace {
std::string fp_key(const Fingerprint& fp) {
  std::string out;
  for (const auto& [k, v] : fp)
    out += std::to_string(k.first) + "," + std::to_string(k.second) + ":" + std::to_string(v) + ";";
  return out;
}
}  // namespace

void ArcModel::ensure_fp_index() {
  if (fp_index_ready_) return;
  fp_index_ready_ = true;
  std::set<std::string> seen;
  for (const GradedString& s : enumerate_strings(alg, 6)) {
    GradedString c = canonical_string(alg, s);
    if (!seen.insert(key(c)).second) continue;
    Fingerprint fp = oracle.fingerprint(oracle.of_string(c));
    for (int j = -8; j <= 8; ++j) fp_index_.emplace(fp_key(fp_translate(fp, j)), c);
    fp_pool_.push_back({c, std::move(fp)});
  }
}

ArcModel::Decomposition ArcModel::decompose_string(const GradedString& s) {
  Decomposition out;
  GradedString cur = canonical_string(alg, s);
  std::string cache_key = key(cur);
  auto hit = decompose_cache_.find(cache_key);
  if (hit != decompose_cache_.end()) return hit->second;
  for (int guard = 0; guard < 64; ++guard) {
    Arc arc = classify_arc(cur);
    if (arc.kind != ArcKind::crossing) {
      out.parts.push_back(cur);
      return decompose_cache_[cache_key] = out;
    }
    // Two surgery certificates resolve a self-intersection.
    //  (a) Extension type: the word splits at a single cut into segments M, N
    //      and re-gluing them (certified glue) reproduces the fingerprint of
    //      the input.
    //  (b) Smoothing type: a prefix P and a suffix Q (possibly overlapping)
    //      form the two strands of the smoothed crossing; the certificate is
    //      that P + Q[j] matches a decomposable self-cone fingerprint.
    struct Split {
      GradedString m, n;
      int m_letters, m_kind;
    };
    std::optional<Split> best;
    auto offer = [&](const Arc& am, const Arc& an) {
      if (getenv("GENTLE_DEBUG_DECOMP")) {
        int inter = -1;
        if (an.kind != ArcKind::crossing) inter = intersections(am, an).interior;
        fprintf(stderr, "offer [%s](%d) + [%s](%d) inter=%d\n",
                format_string(alg, am.string).c_str(), am.self_crossings,
                format_string(alg, an.string).c_str(), an.self_crossings, inter);
      }
      Split cand{am.string, an.string, static_cast<int>(am.string.letters.size()),
                 am.kind == ArcKind::spherelike ? 0 : 1};
      if (!best || std::tie(cand.m_kind, cand.m_letters) < std::tie(best->m_kind, best->m_letters) ||
          (std::tie(cand.m_kind, cand.m_letters) == std::tie(best->m_kind, best->m_letters) &&
           word_less(alg, cand.m.letters, best->m.letters)))
        best = cand;
    };
    const Word& w = cur.letters;
    const Fingerprint& wfp = oracle.fingerprint(oracle.of_string(cur));
    std::vector<Cut> cuts = all_cuts(w);
    // (a) single-cut extension splits
    for (const Cut& c : cuts) {
      Word pre = word_prefix(w, c);
      Word suf = word_suffix(w, c);
      if (pre.empty() || suf.empty()) continue;
      if (!validate_string(alg, pre).empty() || !validate_string(alg, suf).empty()) continue;
      GradedString M{pre, 0, -1}, N{suf, 0, -1};
      Arc am = classify_arc(M), an = classify_arc(N);
      if (am.kind == ArcKind::crossing) continue;
      if (an.self_crossings >= arc.self_crossings) continue;  // strict decrease
      bool ok = false;
      for (const GlueResult& g : glue(M, 1, N, 0)) {
        const Fingerprint& gfp = oracle.fingerprint(oracle.of_string(g.word));
        if (fp_equal_up_to_shift(gfp, wfp)) {
          ok = true;
          break;
        }
      }
      if (ok) offer(am, an);
    }
    // (b) smoothing splits, certified against decomposable self-cones
    std::vector<Fingerprint> targets;
    ProjComplex x = oracle.of_string(cur);
    HomTable t = oracle.hom_table(x, x);
    for (const auto& [k, dim] : t.dims) {
      ProjComplex xk = shift(x, k, oracle.F);
      for (const ChainMap& f : oracle.hom_basis(x, xk)) {
        ProjComplex c = oracle.cone(x, xk, f);
        if (c.zero()) continue;
        if (oracle.is_indecomposable(c).status == Decide::no)
          targets.push_back(oracle.fingerprint(c));
      }
    }
    if (!targets.empty()) {
      for (const Cut& ci : cuts)
        for (const Cut& cj : cuts) {
          Word pre = word_prefix(w, ci);
          Word suf = word_suffix(w, cj);
          if (pre.empty() || suf.empty()) continue;
          if (pre.size() == w.size() && suf.size() == w.size()) continue;
          if (!validate_string(alg, pre).empty() || !validate_string(alg, suf).empty()) continue;
          Arc ap = classify_arc(GradedString{pre, 0, -1});
          Arc aq = classify_arc(GradedString{suf, 0, -1});
          Arc am, an;
          if (ap.kind != ArcKind::crossing) {
            am = ap;
            an = aq;
          } else if (aq.kind != ArcKind::crossing) {
            am = aq;
            an = ap;
          } else {
            continue;
          }
          if (an.self_crossings >= arc.self_crossings) continue;
          if (am.self_crossings + an.self_crossings >= arc.self_crossings) continue;
          const Fingerprint& mfp = oracle.fingerprint(oracle.of_string(am.string));
          const Fingerprint& nfp = oracle.fingerprint(oracle.of_string(an.string));
          bool ok = false;
          for (int j = -8; j <= 8 && !ok; ++j) {
            Fingerprint dfp = fp_translate(nfp, j);
            for (const auto& [kk, dd] : mfp) dfp[kk] += dd;
            for (const Fingerprint& tf : targets)
              if (fp_equal_up_to_shift(dfp, tf)) {
                ok = true;
                break;
              }
          }
          if (ok) offer(am, an);
        }
    }
    if (!best) {
      out.bound_exhausted = true;
      out.parts.push_back(cur);
      return decompose_cache_[cache_key] = out;
    }
    out.parts.push_back(best->m);
    cur = best->n;
  }
  out.bound_exhausted = true;
  out.parts.push_back(cur);
  return decompose_cache_[cache_key] = out;
}

ArcModel::CollectionResult ArcModel::reduce_to_collection(
    const std::vector<GradedString>& generators) {
  CollectionResult res;
  std::map<std::string, Arc> pool;
  auto add = [&](const GradedString& g) {
    Decomposition d = decompose_string(g);
    if (d.bound_exhausted) res.bound_exhausted = true;
    for (const GradedString& p : d.parts) {
      Arc a = classify_arc(p);
      if (a.kind != ArcKind::crossing) pool.emplace(key(p), a);
    }
  };
  for (const GradedString& g : generators) add(g);

  // A trade may only drop an arc that stays glue-reachable from the new pool;
  // otherwise the final membership certificates cannot be replayed.
  auto recoverable = [&](const Arc& victim, const std::map<std::string, Arc>& p) {
    std::string goal = key(victim.string);
    size_t cap = victim.string.letters.size() + 8;
    std::vector<GradedString> states;
    std::set<std::string> seen;
    for (const auto& [k, a] : p)
      if (seen.insert(k).second) states.push_back(a.string);
    for (size_t qi = 0; qi < states.size() && states.size() <= 40; ++qi)
      for (const auto& [k, a] : p)
        for (int e1 = 0; e1 < 2; ++e1)
          for (int e2 = 0; e2 < 2; ++e2)
            for (const GlueResult& g : glue(states[qi], e1, a.string, e2)) {
              GradedString next = canonical_string(alg, g.word);
              if (next.letters.size() > cap) continue;
              std::string nk = key(next);
              if (nk == goal) return true;
              if (seen.insert(nk).second) states.push_back(next);
            }
    return false;
  };

  auto total_interior = [&](const std::map<std::string, Arc>& p) {
    std::vector<const Arc*> arcs;
    for (auto& [k, a] : p) arcs.push_back(&a);
    int total = 0;
    for (size_t i = 0; i < arcs.size(); ++i)
      for (size_t j = i + 1; j < arcs.size(); ++j)
        total += intersections(*arcs[i], *arcs[j]).interior;
    return total;
  };

  for (int round = 0; round < 128; ++round) {
    std::vector<Arc> arcs;
    for (auto& [k, a] : pool) arcs.push_back(a);
    int total = total_interior(pool);
    if (getenv("GENTLE_DEBUG_REDUCE")) {
      fprintf(stderr, "round %d total %d pool:", round, total);
      for (const Arc& a : arcs) fprintf(stderr, " [%s]", format_string(alg, a.string).c_str());
      fprintf(stderr, "\n");
    }
    res.interior_trace.push_back(total);
    if (total == 0) {
      res.arcs = arcs;
      return res;
    }
    // Resolve a crossing pair: cross-join candidates (x1, x2) certified by a
    // decomposable cone between the pair witness the smoothing triangle, so
    // either arc of the pair may be traded for {x1, x2}.  Commit the first
    // certified trade that strictly lowers the total interior count.  Only
    // trades into non-crossing parts are considered, keeping each round cheap.
    bool resolved = false;
    int evaluations = 0;
    std::vector<std::pair<size_t, size_t>> pairs;
    for (size_t ai = 0; ai < arcs.size(); ++ai)
      for (size_t bi = ai + 1; bi < arcs.size(); ++bi)
        if (intersections(arcs[ai], arcs[bi]).interior > 0) pairs.push_back({ai, bi});
    std::sort(pairs.begin(), pairs.end(), [&](const auto& x, const auto& y) {
      return arcs[x.first].string.letters.size() + arcs[x.second].string.letters.size() <
             arcs[y.first].string.letters.size() + arcs[y.second].string.letters.size();
    });
    for (const auto& [ai, bi] : pairs) {
      if (resolved) break;
      {
        const Arc& a = arcs[ai];
        const Arc& b = arcs[bi];
        const std::vector<Fingerprint>& targets = pair_cone_fps(a.string, b.string);
        for (int flip = 0; flip < 2 && !resolved; ++flip) {
          Word wb = flip ? inverse_word(b.string.letters) : b.string.letters;
          for (const Cut& p : all_cuts(a.string.letters)) {
            for (const Cut& q : all_cuts(wb)) {
              Word x1w = concat(word_prefix(a.string.letters, p), word_suffix(wb, q));
              Word x2w = concat(word_prefix(wb, q), word_suffix(a.string.letters, p));
              auto build = [&](Word raw, const Word& lhs, const Word& rhs,
                               int fallback) -> std::optional<GradedString> {
                if (!lhs.empty() && !rhs.empty() &&
                    lhs.back().node_after(alg) != rhs.front().node_before(alg))
                  return std::nullopt;
                int lv = word_left_vertex(alg, raw, fallback);
                std::optional<Word> red = reduce_word(alg, std::move(raw));
                if (!red) return std::nullopt;
                if (red->empty()) return lv < 0 ? std::nullopt
                                                : std::optional(GradedString{{}, 0, lv});
                if (!validate_string(alg, *red).empty()) return std::nullopt;
                return GradedString{*red, 0, -1};
              };
              int fb1 = word_left_vertex(alg, a.string.letters, -1);
              int fb2 = word_left_vertex(alg, wb, -1);
              auto x1 = build(x1w, word_prefix(a.string.letters, p), word_suffix(wb, q), fb1);
              auto x2 = build(x2w, word_prefix(wb, q), word_suffix(a.string.letters, p), fb2);
              if (!x1 || !x2) continue;
              if (x1->letters.size() > 10 || x2->letters.size() > 10) continue;
              const Fingerprint& f1 =
                  oracle.fingerprint(oracle.of_string(canonical_string(alg, *x1)));
              const Fingerprint& f2 =
                  oracle.fingerprint(oracle.of_string(canonical_string(alg, *x2)));
              bool ok = false;
              for (int j = -8; j <= 8 && !ok; ++j) {
                Fingerprint dfp = fp_translate(f2, j);
                for (const auto& [kk, dd] : f1) dfp[kk] += dd;
                for (const Fingerprint& tf : targets)
                  if (fp_equal_up_to_shift(dfp, tf)) {
                    ok = true;
                    break;
                  }
              }
              if (!ok) continue;
              // Certified: try trading away either arc of the pair.
              if (++evaluations > 48) break;
              for (const Arc* victim : {&b, &a}) {
                std::map<std::string, Arc> saved = pool;
                bool saved_exh = res.bound_exhausted;
                pool.erase(key(victim->string));
                add(*x1);
                add(*x2);
                if (getenv("GENTLE_DEBUG_REDUCE"))
                  fprintf(stderr, "  certified trade [%s]+[%s] drop [%s]: exh=%d new_total=%d\n",
                          format_string(alg, *x1).c_str(), format_string(alg, *x2).c_str(),
                          format_string(alg, victim->string).c_str(),
                          (int)res.bound_exhausted, total_interior(pool));
                if (!res.bound_exhausted && total_interior(pool) < total &&
                    recoverable(*victim, pool)) {
                  resolved = true;
                  break;
                }
                res.bound_exhausted = saved_exh;
                pool = std::move(saved);
              }
              if (resolved) break;
            }
            if (resolved || evaluations > 48) break;
          }
          if (evaluations > 48) break;
        }
        if (evaluations > 48) break;
      }
    }
    // Fallback: identify the two string summands of a split cone between the
    // pair directly through the fingerprint index (covers smoothings whose
    // strands are not plain cross-joins of the two words).
    if (!resolved) {
      ensure_fp_index();
      for (const auto& [ai, bi] : pairs) {
        if (resolved) break;
        const Arc& a = arcs[ai];
        const Arc& b = arcs[bi];
        for (const Fingerprint& target : pair_cone_fps(a.string, b.string)) {
          if (resolved) break;
          int tdim = 0;
          for (const auto& [k, v] : target) tdim += v;
          for (const auto& [y1, f1] : fp_pool_) {
            if (resolved) break;
            int d1 = 0;
            for (const auto& [k, v] : f1) d1 += v;
            if (d1 >= tdim) continue;
            for (int j1 = -8; j1 <= 8 && !resolved; ++j1) {
              Fingerprint rem = target;
              bool neg = false;
              for (const auto& [k, v] : fp_translate(f1, j1)) {
                auto it = rem.find(k);
                if (it == rem.end() || it->second < v) {
                  neg = true;
                  break;
                }
                it->second -= v;
                if (it->second == 0) rem.erase(it);
              }
              if (neg || rem.empty()) continue;
              auto hit = fp_index_.find(fp_key(rem));
              if (hit == fp_index_.end()) continue;
              const GradedString& y2 = hit->second;
              for (const Arc* victim : {&b, &a}) {
                std::map<std::string, Arc> saved = pool;
                bool saved_exh = res.bound_exhausted;
                pool.erase(key(victim->string));
                add(y1);
                add(y2);
                if (!res.bound_exhausted && total_interior(pool) < total &&
                    recoverable(*victim, pool)) {
                  resolved = true;
                  break;
                }
                res.bound_exhausted = saved_exh;
                pool = std::move(saved);
              }
            }
          }
        }
      }
    }
    if (!resolved) {
      res.bound_exhausted = true;
      res.arcs = arcs;
      return res;
    }
  }
  res.bound_exhausted = true;
  for (auto& [k, a] : pool) res.arcs.push_back(a);
  return res;
}

ArcModel::PointedCollection ArcModel::to_pointed(const std::vector<Arc>& c, int point_class) {
  std::vector<Arc> arcs;
  {
    std::set<std::string> seen;
    for (const Arc& a : c)
      if (seen.insert(key(a.string)).second) arcs.push_back(classify_arc(a.string));
  }
  if (!is_connected(arcs)) throw std::invalid_argument("to_pointed: collection is disconnected");
  MarkedPoints mp = marked_points(arcs);
  if (point_class < 0 || point_class >= mp.num_classes)
    throw std::invalid_argument("to_pointed: no such marked-point class");
  int v = point_class;
  std::vector<std::string> rewrites;

  auto measure = [&](const std::vector<Arc>& as, const MarkedPoints& pts, int vv) {
    int missing = 0, excess = 0;
    std::map<int, int> deg;
    for (size_t i = 0; i < as.size(); ++i) {
      bool at_v = pts.class_of[2 * i] == vv || pts.class_of[2 * i + 1] == vv;
      if (!at_v) ++missing;
      for (int e = 0; e < 2; ++e)
        if (pts.class_of[2 * i + e] != vv) deg[pts.class_of[2 * i + e]]++;
    }
    for (auto& [cls, d] : deg) excess += std::max(0, d - 1);
    return std::make_pair(missing, excess);
  };

  // Ends at one marked point stay mutually gluable, so v survives every
  // rewrite as "the class of ends gluable with this fixed original end".
  GradedString ref;
  int ref_end = 0;
  {
    bool found = false;
    for (size_t i = 0; i < arcs.size() && !found; ++i)
      for (int e = 0; e < 2 && !found; ++e)
        if (mp.class_of[2 * i + e] == v) {
          ref = arcs[i].string;
          ref_end = e;
          found = true;
        }
  }
  const std::string ref_key = key(ref);
  auto locate_v = [&](const std::vector<Arc>& as, const MarkedPoints& pts) {
    std::vector<bool> hit(pts.num_classes, false);
    for (size_t i = 0; i < as.size(); ++i)
      for (int e = 0; e < 2; ++e) {
        int cls = pts.class_of[2 * i + e];
        if (hit[cls]) continue;
        if ((key(as[i].string) == ref_key && e == ref_end) ||
            !glue(as[i].string, e, ref, ref_end).empty())
          hit[cls] = true;
      }
    int best = -1;
    std::pair<int, int> bm{INT_MAX, INT_MAX};
    for (int cls = 0; cls < pts.num_classes; ++cls)
      if (hit[cls]) {
        auto m = measure(as, pts, cls);
        if (m < bm) {
          bm = m;
          best = cls;
        }
      }
    return best;
  };

  // Best-first search over certified glue rewrites (replace one partner by
  // the glue, or merge both into it).  The star measure orders the frontier
  // but is not required to decrease monotonically: refused class merges can
  // force a detour through an equal-or-worse state.
  struct Node {
    std::vector<Arc> arcs;
    MarkedPoints mp;
    int v = 0;
    std::pair<int, int> m;
    int depth = 0;
    std::vector<std::string> rewrites;
  };
  std::vector<Node> nodes;
  nodes.push_back({arcs, mp, v, measure(arcs, mp, v), 0, {}});
  auto prio = [&](size_t i) {
    return std::make_tuple(nodes[i].m.first, nodes[i].m.second, nodes[i].depth, i);
  };
  std::set<std::tuple<int, int, int, size_t>> open{prio(0)};
  std::set<std::string> visited;
  auto state_key = [&](const std::vector<Arc>& as) {
    std::vector<std::string> ks;
    for (const Arc& a : as) ks.push_back(key(a.string));
    std::sort(ks.begin(), ks.end());
    std::string s;
    for (const std::string& k : ks) s += k + "|";
    return s;
  };
  visited.insert(state_key(arcs));

  bool dbg = getenv("GENTLE_DEBUG_POINTED") != nullptr;
  const int kMaxPops = 400, kMaxDepth = 12;
  bool solved = false;
  for (int pops = 0; pops < kMaxPops && !open.empty(); ++pops) {
    size_t cur = std::get<3>(*open.begin());
    open.erase(open.begin());
    Node n = nodes[cur];
    if (dbg) {
      fprintf(stderr, "pop d=%d v=%d measure=(%d,%d) arcs:", n.depth, n.v, n.m.first, n.m.second);
      for (size_t i = 0; i < n.arcs.size(); ++i)
        fprintf(stderr, " [%s]=(%d,%d)", format_string(alg, n.arcs[i].string).c_str(),
                n.mp.class_of[2 * i], n.mp.class_of[2 * i + 1]);
      fprintf(stderr, "\n");
    }
    if (n.m == std::make_pair(0, 0)) {
      arcs = n.arcs;
      mp = n.mp;
      v = n.v;
      rewrites = n.rewrites;
      solved = true;
      break;
    }
    if (n.depth >= kMaxDepth) continue;

    auto push_child = [&](std::vector<Arc> next, const std::string& desc) {
      std::set<std::string> seen;
      std::vector<Arc> dedup;
      for (const Arc& a : next)
        if (seen.insert(key(a.string)).second) dedup.push_back(a);
      next = std::move(dedup);
      if (!visited.insert(state_key(next)).second) return;
      if (!is_arc_collection(next) || !is_connected(next)) return;
      MarkedPoints nmp;
      try {
        nmp = marked_points(next);
      } catch (const ModelError&) {
        return;
      }
      int nv = locate_v(next, nmp);
      if (nv < 0) return;
      Node child{std::move(next), std::move(nmp), nv, {0, 0}, n.depth + 1, n.rewrites};
      child.m = measure(child.arcs, child.mp, nv);
      child.rewrites.push_back(desc);
      if (dbg)
        fprintf(stderr, "  push (%d,%d): %s\n", child.m.first, child.m.second, desc.c_str());
      nodes.push_back(std::move(child));
      open.insert(prio(nodes.size() - 1));
    };

    for (size_t xi = 0; xi < n.arcs.size(); ++xi)
      for (int xe = 0; xe < 2; ++xe)
        for (size_t yi = 0; yi < n.arcs.size(); ++yi) {
          if (yi == xi) continue;
          for (int ye = 0; ye < 2; ++ye)
            for (const GlueResult& g : glue(n.arcs[xi].string, xe, n.arcs[yi].string, ye)) {
              Arc na = classify_arc(g.word);
              if (na.kind == ArcKind::crossing) continue;
              std::vector<Arc> repl = n.arcs;
              repl[yi] = na;
              push_child(std::move(repl), "replace " + key(n.arcs[yi].string) + " by " +
                                              key(g.word) + " (glued with " +
                                              key(n.arcs[xi].string) + ")");
              std::vector<Arc> merged;
              for (size_t i = 0; i < n.arcs.size(); ++i)
                if (i != xi && i != yi) merged.push_back(n.arcs[i]);
              merged.push_back(na);
              push_child(std::move(merged), "merge " + key(n.arcs[xi].string) + " and " +
                                                key(n.arcs[yi].string) + " into " + key(g.word));
            }
        }
  }
  if (!solved) throw ModelError("to_pointed: rewrite search exhausted");
  PointedCollection p;
  p.arcs = arcs;
  p.points = mp;
  p.basepoint = v;
  p.rewrites = rewrites;
  return p;
}

ArcModel::Regions ArcModel::regions_and_tau(const PointedCollection& p) {
  // Half-edges at the basepoint.
  std::vector<EndRef> half;
  for (int i = 0; i < static_cast<int>(p.arcs.size()); ++i)
    for (int e = 0; e < 2; ++e)
      if (p.points.class_of[2 * i + e] == p.basepoint) half.push_back({i, e});
  int b = static_cast<int>(half.size());

  // Tournament: for each cross-arc half-edge pair, the endpoint morphism at v
  // forces the order.
  std::vector<std::vector<int>> before(b);  // before[x] = list of y with y -> x forbidden... edges x->y
  std::vector<std::vector<bool>> edge(b, std::vector<bool>(b, false));
  for (int x = 0; x < b; ++x)
    for (int y = 0; y < b; ++y) {
      if (x == y || half[x].arc == half[y].arc) continue;
      const Arc& ax = p.arcs[half[x].arc];
      const Arc& ay = p.arcs[half[y].arc];
      // Does an endpoint morphism ax -> ay attach these two half-edges?
      ProjComplex cx = oracle.of_string(ax.string);
      ProjComplex cy = oracle.of_string(ay.string);
      std::vector<Fingerprint> targets;
      for (const GradedString& cand : glue_candidates(ax.string, half[x].end, ay.string, half[y].end))
        targets.push_back(oracle.fingerprint(oracle.of_string(cand)));
      HomTable t = oracle.hom_table(cx, cy);
      bool found = false;
      for (const auto& [k, dim] : t.dims) {
        if (dim == 0 || found) continue;
        ProjComplex yk = shift(cy, k, oracle.F);
        for (const ChainMap& f : oracle.hom_basis(cx, yk)) {
          ProjComplex c = oracle.cone(cx, yk, f);
          if (c.zero()) continue;
          if (oracle.is_indecomposable(c).status != Decide::yes) continue;
          const Fingerprint& cfp = oracle.fingerprint(c);
          for (const Fingerprint& tf : targets)
            if (fp_equal_up_to_shift(tf, cfp)) {
              found = true;
              break;
            }
          if (found) break;
        }
      }
      if (found) edge[x][y] = true;
    }
  // Linear extension, lexicographically least; a cycle is a model violation.
  std::vector<int> order;
  std::vector<bool> used(b, false);
  for (int step = 0; step < b; ++step) {
    int pick = -1;
    for (int x = 0; x < b && pick < 0; ++x) {
      if (used[x]) continue;
      bool blocked = false;
      for (int y = 0; y < b; ++y)
        if (!used[y] && y != x && edge[y][x]) blocked = true;
      if (!blocked) pick = x;
    }
    if (pick < 0) throw ModelError("endpoint tournament at the basepoint is not linear");
    used[pick] = true;
    order.push_back(pick);
  }

  Regions r;
  for (int x : order) r.order.push_back(half[x]);
  r.num_regions = b + 1;
  r.kinds.assign(b + 1, RegionKind::terminal);
  // R_k (k < b) looks at H(k+1) = order[k]; terminal iff that arc is
  // exceptional.  Otherwise tau(k) = 1-based position of the other half-edge
  // of the same spherelike.
  for (int k = 0; k < b; ++k) {
    const EndRef& h = r.order[k];
    const Arc& a = p.arcs[h.arc];
    if (a.kind == ArcKind::exceptional) continue;
    int other = -1;
    for (int m = 0; m < b; ++m)
      if (r.order[m].arc == h.arc && !(r.order[m] == h)) other = m;
    if (other < 0)
      throw ModelError("spherelike half-edge without a partner at the basepoint");
    r.tau[k] = other + 1;
  }
  // tau injectivity.
  std::set<int> images;
  for (const auto& [k, m] : r.tau)
    if (!images.insert(m).second) throw ModelError("tau is not injective");
  // Orbit dichotomy fills in the kinds.
  for (const auto& [start, first] : r.tau) {
    std::vector<int> orbit = {start};
    int cur = start;
    RegionKind kind = RegionKind::terminating;
    for (int guard = 0; guard <= b + 1; ++guard) {
      auto it = r.tau.find(cur);
      if (it == r.tau.end()) {
        kind = RegionKind::terminating;  // reached a terminal region
        break;
      }
      cur = it->second;
      if (cur == start) {
        kind = RegionKind::cyclic;
        break;
      }
      if (std::find(orbit.begin(), orbit.end(), cur) != orbit.end())
        throw ModelError("tau orbit revisits a non-initial region");
      orbit.push_back(cur);
    }
    r.kinds[start] = kind;
  }
  return r;
}

ArcModel::PsiPath ArcModel::psi_path(const PointedCollection& p, const Regions& r, int region) {
  if (region < 0 || region >= r.num_regions || r.kinds[region] == RegionKind::terminal ||
      r.tau.find(region) == r.tau.end())
    throw std::invalid_argument("psi_path: region is terminal");
  PsiPath out;
  std::vector<const Arc*> chain;
  int cur = region;
  bool cyclic = false;
  for (int guard = 0; guard <= r.num_regions; ++guard) {
    auto it = r.tau.find(cur);
    if (it == r.tau.end()) break;
    chain.push_back(&p.arcs[r.order[cur].arc]);
    out.orbit.push_back(cur);
    cur = it->second;
    if (cur == region) {
      cyclic = true;
      break;
    }
  }
  GradedString word = chain.front()->string;
  for (size_t i = 1; i < chain.size(); ++i) {
    std::optional<GradedString> next;
    for (int ea = 0; ea < 2 && !next; ++ea)
      for (int eb = 0; eb < 2 && !next; ++eb)
        for (const GlueResult& g : glue(word, ea, chain[i]->string, eb)) {
          Arc na = classify_arc(g.word);
          if (na.kind == ArcKind::crossing) continue;
          next = g.word;
          break;
        }
    if (!next) throw ModelError("psi_path: gluing along the tau orbit failed to certify");
    word = *next;
  }
  out.word = canonical_string(alg, word);
  if (!cyclic) {
    out.tag = LoopTag::string_arc;
  } else if (!out.word.empty() && band_degree(out.word.letters) == 0 &&
             validate_band(alg, out.word.letters).empty()) {
    out.tag = LoopTag::band;
  } else {
    out.tag = LoopTag::ungraded_loop;
  }
  return out;
}

}  // namespace gentle
