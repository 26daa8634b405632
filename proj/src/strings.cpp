#include "gentle/strings.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace gentle {

// --- validity ---------------------------------------------------------------

std::optional<std::string> check_letter(const GentleAlgebra& alg, const Letter& l) {
  if (l.path.trivial()) return "letter path must be nonempty";
  const std::vector<int>& p = l.path.arrows;
  for (size_t i = 0; i + 1 < p.size(); ++i) {
    if (alg.tgt(p[i]) != alg.src(p[i + 1]))
      return "letter path is not composable at " + alg.arrow_name(p[i]);
    if (alg.forbidden(p[i], p[i + 1]))
      return "letter path contains relation " + alg.arrow_name(p[i]) + " " + alg.arrow_name(p[i + 1]);
  }
  return std::nullopt;
}

std::optional<std::string> check_junction(const GentleAlgebra& alg, const Letter& a, const Letter& b) {
  if (a.node_after(alg) != b.node_before(alg)) return "junction vertices do not match";
  if (b == a.inverted()) return "immediate backtrack";
  int a_first = a.path.arrows.front(), a_last = a.path.arrows.back();
  int b_first = b.path.arrows.front(), b_last = b.path.arrows.back();
  if (!a.inverse && !b.inverse) {
    if (!alg.forbidden(a_last, b_first)) return "direct-direct junction must lie in I";
  } else if (a.inverse && b.inverse) {
    if (!alg.forbidden(b_last, a_first)) return "inverse-inverse junction must lie in I";
  } else if (!a.inverse && b.inverse) {
    // Both paths end at the junction vertex; they must do so along distinct arrows.
    if (a_last == b_last) return "direct-inverse junction needs distinct final arrows";
  } else {
    // Both paths start at the junction vertex.
    if (a_first == b_first) return "inverse-direct junction needs distinct initial arrows";
  }
  return std::nullopt;
}

std::vector<JunctionViolation> validate_string(const GentleAlgebra& alg, const Word& w) {
  std::vector<JunctionViolation> out;
  for (size_t i = 0; i < w.size(); ++i)
    if (auto err = check_letter(alg, w[i])) out.push_back({static_cast<int>(i), *err});
  for (size_t i = 0; i + 1 < w.size(); ++i)
    if (auto err = check_junction(alg, w[i], w[i + 1]))
      out.push_back({static_cast<int>(i), *err});
  return out;
}

int band_degree(const Word& w) {
  int d = 0;
  for (const Letter& l : w) d += l.inverse ? -1 : 1;
  return d;
}

bool is_proper_power(const Word& w) {
  size_t n = w.size();
  for (size_t d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    bool power = true;
    for (size_t i = 0; i < n && power; ++i) power = (w[i] == w[(i + d) % n]);
    if (power) return true;
  }
  return false;
}

std::vector<JunctionViolation> validate_band(const GentleAlgebra& alg, const Word& w) {
  std::vector<JunctionViolation> out = validate_string(alg, w);
  int n = static_cast<int>(w.size());
  if (n < 2) {
    out.push_back({0, "band must have at least two letters"});
    return out;
  }
  if (auto err = check_junction(alg, w.back(), w.front()))
    out.push_back({n - 1, "cyclic closure: " + *err});
  if (band_degree(w) != 0) out.push_back({0, "ungraded cyclic word"});
  if (is_proper_power(w)) out.push_back({0, "band must not be a proper power"});
  return out;
}

// --- gradings ---------------------------------------------------------------

std::vector<int> grade_word(const Word& w, int base) {
  std::vector<int> b{base};
  for (const Letter& l : w) b.push_back(b.back() + (l.inverse ? -1 : 1));
  return b;
}

// --- orientation and equivalence -----------------------------------------------

Word inverse_word(const Word& w) {
  Word out;
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(it->inverted());
  return out;
}

bool letter_less(const GentleAlgebra& alg, const Letter& a, const Letter& b) {
  std::vector<std::string> an, bn;
  for (int x : a.path.arrows) an.push_back(alg.arrow_name(x));
  for (int x : b.path.arrows) bn.push_back(alg.arrow_name(x));
  if (an != bn) return an < bn;
  return a.inverse < b.inverse;
}

bool word_less(const GentleAlgebra& alg, const Word& a, const Word& b) {
  for (size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] == b[i]) continue;
    return letter_less(alg, a[i], b[i]);
  }
  return a.size() < b.size();
}

Word canonical_string(const GentleAlgebra& alg, const Word& w) {
  Word inv = inverse_word(w);
  return word_less(alg, inv, w) ? inv : w;
}

GradedString canonical_string(const GentleAlgebra& alg, const GradedString& s) {
  GradedString out;
  out.letters = canonical_string(alg, s.letters);
  out.base = 0;
  out.basepoint = s.empty() ? s.basepoint : -1;
  return out;
}

bool string_equiv(const GentleAlgebra& alg, const GradedString& a, const GradedString& b) {
  GradedString ca = canonical_string(alg, a), cb = canonical_string(alg, b);
  return ca.letters == cb.letters && ca.basepoint == cb.basepoint;
}

Word canonical_band(const GentleAlgebra& alg, const Word& w) {
  Word best = w;
  for (const Word& base : {w, inverse_word(w)}) {
    Word rot = base;
    for (size_t k = 0; k < base.size(); ++k) {
      std::rotate(rot.begin(), rot.begin() + 1, rot.end());
      if (word_less(alg, rot, best)) best = rot;
    }
  }
  return best;
}

bool band_equiv(const GentleAlgebra& alg, const GradedBand& a, const GradedBand& b) {
  return canonical_band(alg, a.letters) == canonical_band(alg, b.letters);
}

GradedBand normalize_band(const GradedBand& b) {
  GradedBand out = b;
  out.dimension = 1;
  return out;
}

// --- the reduction calculus ------------------------------------------------------

namespace {

// Replace w[i], w[i+1] by the given letters (either may be absent).
void splice(Word& w, size_t i, const std::vector<Letter>& repl) {
  w.erase(w.begin() + i, w.begin() + i + 2);
  w.insert(w.begin() + i, repl.begin(), repl.end());
}

}  // namespace

std::optional<Word> reduce_word(const GentleAlgebra& alg, Word w) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i + 1 < w.size(); ++i) {
      const Letter& L = w[i];
      const Letter& R = w[i + 1];
      if (L.node_after(alg) != R.node_before(alg)) return std::nullopt;
      const std::vector<int>& p = L.path.arrows;
      const std::vector<int>& q = R.path.arrows;
      if (!L.inverse && R.inverse) {
        // Both paths end at the seam; cancel their maximal common suffix.
        size_t k = 0;
        while (k < p.size() && k < q.size() && p[p.size() - 1 - k] == q[q.size() - 1 - k]) ++k;
        if (k == 0) continue;  // already reduced (distinct final arrows)
        std::vector<int> pr(p.begin(), p.end() - k), qr(q.begin(), q.end() - k);
        std::vector<Letter> repl;
        if (!pr.empty()) repl.push_back(Letter{Path{pr, -1}, false});
        if (!qr.empty()) repl.push_back(Letter{Path{qr, -1}, true});
        splice(w, i, repl);
        changed = true;
        break;
      }
      if (L.inverse && !R.inverse) {
        // Both paths start at the seam; cancel their maximal common prefix.
        size_t k = 0;
        while (k < p.size() && k < q.size() && p[k] == q[k]) ++k;
        if (k == 0) continue;
        std::vector<int> pr(p.begin() + k, p.end()), qr(q.begin() + k, q.end());
        std::vector<Letter> repl;
        if (!pr.empty()) repl.push_back(Letter{Path{pr, -1}, true});
        if (!qr.empty()) repl.push_back(Letter{Path{qr, -1}, false});
        splice(w, i, repl);
        changed = true;
        break;
      }
      if (!L.inverse && !R.inverse) {
        // Composable seam with no relation: one longer permitted path.
        if (alg.forbidden(p.back(), q.front())) continue;
        std::vector<int> fused = p;
        fused.insert(fused.end(), q.begin(), q.end());
        splice(w, i, {Letter{Path{fused, -1}, false}});
        changed = true;
        break;
      }
      // Both inverse: the forward composite is q then p.
      if (alg.forbidden(q.back(), p.front())) continue;
      std::vector<int> fused = q;
      fused.insert(fused.end(), p.begin(), p.end());
      splice(w, i, {Letter{Path{fused, -1}, true}});
      changed = true;
      break;
    }
  }
  return w;
}

// --- enumeration -------------------------------------------------------------------

std::vector<Letter> all_letters(const GentleAlgebra& alg) {
  std::vector<Letter> out;
  for (const Path& p : all_permitted_paths(alg)) {
    if (p.trivial()) continue;
    out.push_back(Letter{p, false});
    out.push_back(Letter{p, true});
  }
  std::sort(out.begin(), out.end(),
            [&](const Letter& a, const Letter& b) { return letter_less(alg, a, b); });
  return out;
}

std::vector<GradedString> enumerate_strings(const GentleAlgebra& alg, int max_letters) {
  std::vector<GradedString> out;
  std::set<std::string> seen;
  auto emit = [&](const GradedString& s) {
    GradedString c = canonical_string(alg, s);
    std::string key = format_string(alg, c);
    if (seen.insert(key).second) out.push_back(c);
  };
  for (int v = 0; v < alg.num_vertices(); ++v) emit(GradedString{{}, 0, v});
  std::vector<Letter> letters = all_letters(alg);
  Word cur;
  std::function<void()> dfs = [&]() {
    if (static_cast<int>(cur.size()) >= max_letters) return;
    for (const Letter& l : letters) {
      if (!cur.empty() && check_junction(alg, cur.back(), l)) continue;
      cur.push_back(l);
      emit(GradedString{cur, 0, -1});
      dfs();
      cur.pop_back();
    }
  };
  if (max_letters > 0) dfs();
  return out;
}

std::vector<GradedBand> enumerate_bands(const GentleAlgebra& alg, int max_letters) {
  std::vector<GradedBand> out;
  std::set<std::string> seen;
  std::vector<Letter> letters = all_letters(alg);
  Word cur;
  std::function<void()> dfs = [&]() {
    if (static_cast<int>(cur.size()) >= 2 && validate_band(alg, cur).empty()) {
      Word c = canonical_band(alg, cur);
      std::string key = format_string(alg, GradedString{c, 0, -1});
      if (seen.insert(key).second) out.push_back(GradedBand{c, 0, 1, 1});
    }
    if (static_cast<int>(cur.size()) >= max_letters) return;
    for (const Letter& l : letters) {
      if (!cur.empty() && check_junction(alg, cur.back(), l)) continue;
      cur.push_back(l);
      dfs();
      cur.pop_back();
    }
  };
  if (max_letters >= 2) dfs();
  return out;
}

// --- literal syntax ------------------------------------------------------------------

namespace {

Letter parse_letter(const GentleAlgebra& alg, std::string tok) {
  Letter l;
  if (tok.size() >= 2 && tok.substr(tok.size() - 2) == "^-") {
    l.inverse = true;
    tok = tok.substr(0, tok.size() - 2);
  }
  std::istringstream in(tok);
  std::string name;
  while (std::getline(in, name, '.')) {
    int a = alg.quiver.arrow_index(name);
    if (a < 0) throw ParseError(0, "unknown arrow in letter: " + name);
    l.path.arrows.push_back(a);
  }
  if (l.path.arrows.empty()) throw ParseError(0, "empty letter");
  if (auto err = check_letter(alg, l)) throw ParseError(0, *err);
  return l;
}

}  // namespace

GradedString parse_string_literal(const GentleAlgebra& alg, const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> toks;
  std::string tok;
  while (in >> tok) toks.push_back(tok);
  if (toks.empty()) throw ParseError(0, "empty string literal");
  GradedString s;
  // Lazy string: e@<vertex> or e@<vertex>@<base>.
  if (toks.size() == 1 && toks[0].rfind("e@", 0) == 0) {
    std::string rest = toks[0].substr(2);
    size_t at = rest.find('@');
    std::string vname = at == std::string::npos ? rest : rest.substr(0, at);
    int v = alg.quiver.vertex_index(vname);
    if (v < 0) throw ParseError(0, "unknown vertex: " + vname);
    s.basepoint = v;
    if (at != std::string::npos) s.base = std::stoi(rest.substr(at + 1));
    return s;
  }
  for (size_t i = 0; i < toks.size(); ++i) {
    if (toks[i][0] == '@') {
      if (i + 1 != toks.size()) throw ParseError(0, "@base must be the final token");
      s.base = std::stoi(toks[i].substr(1));
      break;
    }
    s.letters.push_back(parse_letter(alg, toks[i]));
  }
  std::vector<JunctionViolation> v = validate_string(alg, s.letters);
  if (!v.empty())
    throw ParseError(0, "invalid string at junction " + std::to_string(v[0].index) + ": " + v[0].message);
  return s;
}

bool is_band_literal(const std::string& text) {
  return text.find('[') != std::string::npos;
}

GradedBand parse_band_literal(const GentleAlgebra& alg, const std::string& text) {
  size_t l = text.find('['), r = text.find(']');
  if (l == std::string::npos || r == std::string::npos || r < l)
    throw ParseError(0, "band literal must be bracketed: [letters]");
  GradedBand b;
  std::istringstream in(text.substr(l + 1, r - l - 1));
  std::string tok;
  while (in >> tok) b.letters.push_back(parse_letter(alg, tok));
  // Options after the bracket: ;lambda=..;dim=..
  std::istringstream opts(text.substr(r + 1));
  std::string opt;
  while (std::getline(opts, opt, ';')) {
    if (opt.empty()) continue;
    size_t eq = opt.find('=');
    if (eq == std::string::npos) throw ParseError(0, "bad band option: " + opt);
    std::string key = opt.substr(0, eq);
    int val = std::stoi(opt.substr(eq + 1));
    if (key == "lambda")
      b.scalar = val;
    else if (key == "dim")
      b.dimension = val;
    else
      throw ParseError(0, "unknown band option: " + key);
  }
  std::vector<JunctionViolation> v = validate_band(alg, b.letters);
  if (!v.empty())
    throw ParseError(0, "invalid band at junction " + std::to_string(v[0].index) + ": " + v[0].message);
  if (b.dimension < 1) throw ParseError(0, "band dimension must be positive");
  return b;
}

std::string format_string(const GentleAlgebra& alg, const GradedString& s) {
  std::ostringstream out;
  if (s.empty()) {
    out << "e@" << alg.vertex_name(s.basepoint);
    if (s.base != 0) out << "@" << s.base;
    return out.str();
  }
  for (size_t i = 0; i < s.letters.size(); ++i) {
    if (i) out << " ";
    const Letter& l = s.letters[i];
    for (size_t j = 0; j < l.path.arrows.size(); ++j) {
      if (j) out << ".";
      out << alg.arrow_name(l.path.arrows[j]);
    }
    if (l.inverse) out << "^-";
  }
  if (s.base != 0) out << " @" << s.base;
  return out.str();
}

std::string format_band(const GentleAlgebra& alg, const GradedBand& b) {
  std::ostringstream out;
  out << "[" << format_string(alg, GradedString{b.letters, 0, -1}) << "]";
  if (b.scalar != 1) out << ";lambda=" << b.scalar;
  if (b.dimension != 1) out << ";dim=" << b.dimension;
  return out.str();
}

}  // namespace gentle
