#include "gentle/poset.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <queue>
#include <set>
#include <stdexcept>

namespace gentle {

ThickPoset::ThickPoset(const GentleAlgebra& a, int field_order) : alg(a), model(a, field_order) {}

std::string ThickPoset::collection_key(const std::vector<GradedString>& c) {
  std::vector<std::string> keys;
  for (const GradedString& s : c) keys.push_back(model.key(s));
  std::sort(keys.begin(), keys.end());
  std::string out;
  for (const std::string& k : keys) out += k + ";";
  return out;
}

Generated ThickPoset::is_generated(const GradedString& target, const std::vector<GradedString>& c,
                                   int bound) {
  GradedString t = canonical_string(alg, target);
  if (bound < 0) bound = 2 * (static_cast<int>(t.letters.size()) + static_cast<int>(c.size())) + 2;
  std::string memo_key =
      collection_key(c) + "|" + model.key(t) + "|" + std::to_string(bound);
  auto hit = memo_.find(memo_key);
  if (hit != memo_.end()) return hit->second;
  Generated res;
  auto done = [&](Generated g) {
    memo_[memo_key] = g;
    return g;
  };

  std::string tkey = model.key(t);
  std::vector<GradedString> arcs;
  for (const GradedString& s : c) arcs.push_back(canonical_string(alg, s));

  // Reflexivity.
  for (size_t i = 0; i < arcs.size(); ++i)
    if (model.key(arcs[i]) == tkey) {
      res.outcome = Outcome::yes;
      res.factorization = Factorization{static_cast<int>(i), arcs[i], {}};
      return done(res);
    }
  if (arcs.empty()) {
    res.outcome = Outcome::no;
    res.reason = "empty collection generates only zero";
    return done(res);
  }

  // Fast fail: a generated arc never crosses an arc of the collection.  Only
  // applicable when the target is itself an arc (crossing strings decompose,
  // so their census against the collection is not a crossing count).
  Arc ta = model.classify_arc(t);
  for (const GradedString& s : arcs) {
    if (ta.kind == ArcKind::crossing) break;
    try {
      if (model.intersections(ta, model.classify_arc(s)).interior > 0) {
        res.outcome = Outcome::no;
        res.reason = "target crosses a collection arc";
        return done(res);
      }
    } catch (const ModelError&) {
      // Census unavailable for this pair; the fast fail simply does not apply.
    }
  }

  // Refutation by hom vanishing: if hom(X, T) = 0 for every X in c at every
  // shift, then T in thick(c) would force hom(T, T) = 0; same with the
  // directions swapped.
  Oracle& o = model.oracle;
  ProjComplex tc = o.of_string(t);
  bool into = false, outof = false;
  for (const GradedString& s : arcs) {
    ProjComplex sc = o.of_string(s);
    if (o.hom_table(sc, tc).total > 0) into = true;
    if (o.hom_table(tc, sc).total > 0) outof = true;
    if (into && outof) break;
  }
  if (!into || !outof) {
    res.outcome = Outcome::no;
    res.reason = !into ? "hom(c, target) vanishes identically" : "hom(target, c) vanishes identically";
    return done(res);
  }

  // Bounded best-first closure over certified gluings; shortest words are
  // expanded first so small targets are reached before the frontier grows.
  struct State {
    GradedString word;
    Factorization fact;
  };
  auto later = [&](const State& x, const State& y) {
    return std::make_pair(x.word.letters.size(), model.key(x.word)) >
           std::make_pair(y.word.letters.size(), model.key(y.word));
  };
  std::priority_queue<State, std::vector<State>, decltype(later)> queue(later);
  std::set<std::string> seen;
  for (size_t i = 0; i < arcs.size(); ++i)
    if (seen.insert(model.key(arcs[i])).second)
      queue.push({arcs[i], Factorization{static_cast<int>(i), arcs[i], {}}});
  while (!queue.empty()) {
    State st = queue.top();
    queue.pop();
    for (size_t i = 0; i < arcs.size(); ++i)
      for (int se = 0; se < 2; ++se)
        for (int ae = 0; ae < 2; ++ae)
          for (const GlueResult& g : model.glue(st.word, se, arcs[i], ae)) {
            GradedString next = canonical_string(alg, g.word);
            if (static_cast<int>(next.letters.size()) > bound) {
              res.pruned = true;
              continue;
            }
            if (!seen.insert(model.key(next)).second) continue;
            Factorization f = st.fact;
            f.steps.push_back({static_cast<int>(i), se, ae, next});
            if (model.key(next) == tkey) {
              res.outcome = Outcome::yes;
              res.factorization = std::move(f);
              return done(res);
            }
            queue.push({next, std::move(f)});
          }
  }
  if (res.pruned) {
    res.outcome = Outcome::bound_exhausted;
    res.reason = "gluing closure truncated at the word-length bound";
  } else {
    res.outcome = Outcome::no;
    res.reason = "gluing closure exhausted without reaching the target";
  }
  return done(res);
}

bool ThickPoset::verify(const Factorization& f, const std::vector<GradedString>& c,
                        const GradedString& target) {
  if (f.start_arc < 0 || f.start_arc >= static_cast<int>(c.size())) return false;
  if (!string_equiv(alg, f.start, c[f.start_arc])) return false;
  GradedString state = canonical_string(alg, f.start);
  for (const Factorization::Step& step : f.steps) {
    if (step.arc < 0 || step.arc >= static_cast<int>(c.size())) return false;
    GradedString arc = canonical_string(alg, c[step.arc]);
    bool found = false;
    for (const GlueResult& g : model.glue(state, step.state_end, arc, step.arc_end))
      if (model.key(canonical_string(alg, g.word)) == model.key(step.result)) {
        found = true;
        break;
      }
    if (!found) return false;
    state = canonical_string(alg, step.result);
  }
  // The folded word must land in the class of the target.
  if (model.key(state) == model.key(canonical_string(alg, target))) return true;
  Oracle& o = model.oracle;
  return o.fp_match_shift(o.of_string(state), o.of_string(target)).has_value();
}

LeqResult ThickPoset::leq_gen(const std::vector<GradedString>& a,
                              const std::vector<GradedString>& b, int bound) {
  LeqResult out;
  bool exhausted = false;
  for (const GradedString& s : a) {
    Generated g = is_generated(s, b, bound);
    if (g.outcome == Outcome::no) {
      out.outcome = Outcome::no;
      out.reason = "arc " + format_string(alg, canonical_string(alg, s)) + ": " + g.reason;
      return out;
    }
    if (g.outcome == Outcome::bound_exhausted) {
      exhausted = true;
      continue;
    }
    out.certificates.push_back(*g.factorization);
  }
  out.outcome = exhausted ? Outcome::bound_exhausted : Outcome::yes;
  if (exhausted) out.reason = "at least one membership search hit the bound";
  return out;
}

Outcome ThickPoset::equiv_gen(const std::vector<GradedString>& a,
                              const std::vector<GradedString>& b, int bound) {
  LeqResult ab = leq_gen(a, b, bound);
  if (ab.outcome == Outcome::no) return Outcome::no;
  LeqResult ba = leq_gen(b, a, bound);
  if (ba.outcome == Outcome::no) return Outcome::no;
  if (ab.outcome == Outcome::yes && ba.outcome == Outcome::yes) return Outcome::yes;
  return Outcome::bound_exhausted;
}

BandElimination ThickPoset::eliminate_bands(const std::vector<GradedString>& strings,
                                            const std::vector<GradedBand>& bands,
                                            int letter_bound) {
  BandElimination out;
  if (strings.empty()) {
    if (bands.empty()) return out;
    out.no_string_present = true;
    return out;
  }
  Oracle& o = model.oracle;
  // Ext-connectivity of the generating set.
  std::vector<ProjComplex> gens;
  for (const GradedString& s : strings) gens.push_back(o.of_string(s));
  for (const GradedBand& b : bands) gens.push_back(o.of_band(normalize_band(b)));
  int n = static_cast<int>(gens.size());
  std::vector<int> comp(n, -1);
  std::deque<int> bfs{0};
  comp[0] = 0;
  while (!bfs.empty()) {
    int x = bfs.front();
    bfs.pop_front();
    for (int y = 0; y < n; ++y) {
      if (comp[y] >= 0) continue;
      if (o.hom_table(gens[x], gens[y]).total > 0 || o.hom_table(gens[y], gens[x]).total > 0) {
        comp[y] = 0;
        bfs.push_back(y);
      }
    }
  }
  for (int x = 0; x < n; ++x)
    if (comp[x] < 0) throw std::invalid_argument("eliminate_bands: generating set is not Ext-connected");

  out.strings = strings;
  std::vector<GradedString> family = enumerate_strings(alg, letter_bound);
  for (const GradedBand& band : bands) {
    GradedBand nb = normalize_band(band);
    ProjComplex bc = o.of_band(nb);
    bool replaced = false;
    for (const GradedString& y : strings) {
      ProjComplex yc = o.of_string(y);
      HomTable t = o.hom_table(yc, bc);
      for (const auto& [k, dim] : t.dims) {
        ProjComplex bk = shift(bc, k, o.F);
        for (const ChainMap& f : o.hom_basis(yc, bk)) {
          ProjComplex cone = o.cone(yc, bk, f);
          if (cone.zero()) continue;
          for (const GradedString& s : family) {
            if (auto sh = o.fp_match_shift(cone, o.of_string(s))) {
              out.strings.push_back(canonical_string(alg, s));
              out.certificates.push_back(
                  "band " + format_band(alg, nb) + ": cone of a basis morphism from " +
                  format_string(alg, canonical_string(alg, y)) + " at shift " +
                  std::to_string(k) + " matches string " +
                  format_string(alg, canonical_string(alg, s)) + " up to shift " +
                  std::to_string(*sh));
              replaced = true;
              break;
            }
          }
          if (replaced) break;
        }
        if (replaced) break;
      }
      if (replaced) break;
    }
    if (!replaced) out.bound_exhausted = true;
  }
  // Deduplicate while keeping order.
  std::set<std::string> seen;
  std::vector<GradedString> dedup;
  for (const GradedString& s : out.strings)
    if (seen.insert(model.key(s)).second) dedup.push_back(canonical_string(alg, s));
  out.strings = std::move(dedup);
  return out;
}

ThickPoset::Poset ThickPoset::build_poset(int letter_bound, int max_arcs, int bound) {
  // Candidate arcs: simple string classes within the letter bound.
  std::vector<Arc> arcs;
  {
    std::set<std::string> seen;
    for (const GradedString& s : enumerate_strings(alg, letter_bound)) {
      Arc a = model.classify_arc(s);
      if (a.kind == ArcKind::crossing) continue;
      if (seen.insert(model.key(a.string)).second) arcs.push_back(a);
    }
    std::sort(arcs.begin(), arcs.end(), [&](const Arc& x, const Arc& y) {
      return model.key(x.string) < model.key(y.string);
    });
  }
  // Connected non-crossing subsets, up to max_arcs arcs.
  std::vector<std::vector<GradedString>> collections;
  std::vector<int> pick;
  std::function<void(size_t)> rec = [&](size_t from) {
    if (!pick.empty()) {
      std::vector<Arc> sel;
      for (int i : pick) sel.push_back(arcs[i]);
      if (model.is_arc_collection(sel) && model.is_connected(sel)) {
        std::vector<GradedString> ws;
        for (const Arc& a : sel) ws.push_back(a.string);
        collections.push_back(std::move(ws));
      }
    }
    if (static_cast<int>(pick.size()) >= max_arcs) return;
    for (size_t i = from; i < arcs.size(); ++i) {
      bool compatible = true;
      for (int j : pick)
        if (model.intersections(arcs[j], arcs[i]).interior > 0) {
          compatible = false;
          break;
        }
      if (!compatible) continue;
      pick.push_back(static_cast<int>(i));
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);

  int m = static_cast<int>(collections.size());
  // Pairwise comparisons.
  std::vector<std::vector<Outcome>> leq(m, std::vector<Outcome>(m, Outcome::yes));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j) leq[i][j] = leq_gen(collections[i], collections[j], bound).outcome;

  // Group by mutual generation.
  std::vector<int> cls(m, -1);
  int nc = 0;
  for (int i = 0; i < m; ++i) {
    if (cls[i] >= 0) continue;
    cls[i] = nc;
    for (int j = i + 1; j < m; ++j)
      if (cls[j] < 0 && leq[i][j] == Outcome::yes && leq[j][i] == Outcome::yes) cls[j] = nc;
    ++nc;
  }
  Poset out;
  out.nodes.resize(nc);
  for (int i = 0; i < m; ++i) out.nodes[cls[i]].members.push_back(collections[i]);
  for (Poset::Node& node : out.nodes) {
    std::sort(node.members.begin(), node.members.end(),
              [&](const std::vector<GradedString>& x, const std::vector<GradedString>& y) {
                return collection_key(x) < collection_key(y);
              });
    node.rep = node.members.front();
  }
  // Class-level relations from representatives.
  std::vector<int> rep_idx(nc, -1);
  for (int i = 0; i < m; ++i)
    if (collection_key(collections[i]) == collection_key(out.nodes[cls[i]].rep))
      rep_idx[cls[i]] = i;
  std::vector<std::vector<bool>> below(nc, std::vector<bool>(nc, false));
  for (int x = 0; x < nc; ++x)
    for (int y = 0; y < nc; ++y) {
      if (x == y) continue;
      Outcome oc = leq[rep_idx[x]][rep_idx[y]];
      if (oc == Outcome::yes)
        below[x][y] = true;
      else if (oc == Outcome::bound_exhausted)
        out.unknown.emplace_back(x, y);
    }
  // Transitive reduction.
  for (int x = 0; x < nc; ++x)
    for (int y = 0; y < nc; ++y) {
      if (!below[x][y]) continue;
      bool covering = true;
      for (int z = 0; z < nc && covering; ++z)
        if (z != x && z != y && below[x][z] && below[z][y]) covering = false;
      if (covering) out.edges.emplace_back(x, y);
    }
  return out;
}

}  // namespace gentle
