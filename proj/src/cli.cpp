#include "gentle/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "gentle/poset.hpp"
#include "json.hpp"

namespace gentle {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

struct Options {
  std::string verb;
  std::vector<std::string> positional;
  std::map<std::string, std::string> named;
  std::set<std::string> flags;

  bool has(const std::string& k) const { return named.count(k) || flags.count(k); }
  std::string get(const std::string& k, const std::string& def = "") const {
    auto it = named.find(k);
    return it == named.end() ? def : it->second;
  }
  std::string require(const std::string& k) const {
    auto it = named.find(k);
    if (it == named.end()) throw UsageError("missing required option --" + k);
    return it->second;
  }
  int get_int(const std::string& k, int def) const {
    auto it = named.find(k);
    if (it == named.end()) return def;
    try {
      return std::stoi(it->second);
    } catch (...) {
      throw UsageError("option --" + k + " expects an integer, got '" + it->second + "'");
    }
  }
};

// Options that never take a value.
const std::set<std::string> kFlags = {"reproducible", "json", "members", "verify"};

Options parse_args(const std::vector<std::string>& args) {
  Options o;
  if (args.empty()) throw UsageError("no verb given");
  o.verb = args[0];
  for (size_t i = 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) {
      o.positional.push_back(a);
      continue;
    }
    std::string body = a.substr(2);
    auto eq = body.find('=');
    if (eq != std::string::npos) {
      o.named[body.substr(0, eq)] = body.substr(eq + 1);
    } else if (kFlags.count(body)) {
      o.flags.insert(body);
    } else {
      if (i + 1 >= args.size()) throw UsageError("option --" + body + " expects a value");
      o.named[body] = args[++i];
    }
  }
  if (o.named.count("o")) o.named["out"] = o.named["o"];
  return o;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw UsageError("cannot read file '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Lines of a list file: '#' comments and blank lines skipped.
std::vector<std::string> list_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    size_t b = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(a, b - a + 1));
  }
  return out;
}

// A collection argument is either a list-file path or ';'-separated literals.
std::vector<std::string> collection_literals(const std::string& arg) {
  if (std::filesystem::exists(arg)) return list_lines(read_file(arg));
  std::vector<std::string> out;
  std::istringstream in(arg);
  std::string item;
  while (std::getline(in, item, ';')) {
    size_t a = item.find_first_not_of(" \t");
    if (a == std::string::npos) continue;
    size_t b = item.find_last_not_of(" \t");
    out.push_back(item.substr(a, b - a + 1));
  }
  if (out.empty()) throw UsageError("empty collection argument '" + arg + "'");
  return out;
}

struct Generators {
  std::vector<GradedString> strings;
  std::vector<GradedBand> bands;
};

Generators parse_generators(const GentleAlgebra& alg, const std::vector<std::string>& lits) {
  Generators g;
  for (const std::string& lit : lits) {
    if (is_band_literal(lit))
      g.bands.push_back(parse_band_literal(alg, lit));
    else
      g.strings.push_back(parse_string_literal(alg, lit));
  }
  return g;
}

GentleAlgebra load_algebra(const Options& o) {
  if (o.positional.empty()) throw UsageError("verb '" + o.verb + "' needs an algebra file");
  return parse_algebra(read_file(o.positional[0]));
}

int field_order(const Options& o) {
  if (o.named.count("field")) return o.get_int("field", 2);
  if (const char* env = std::getenv("GENTLE_FIELD")) {
    try {
      return std::stoi(env);
    } catch (...) {
      throw UsageError("GENTLE_FIELD is not an integer");
    }
  }
  return 2;
}

bool json_mode(const Options& o) { return o.get("format") == "json" || o.flags.count("json"); }

void emit(const Options& o, std::ostream& out, const std::string& text, const json& j) {
  std::string payload = json_mode(o) ? j.dump(2) + "\n" : text;
  if (o.named.count("out")) {
    std::ofstream f(o.get("out"));
    if (!f.good()) throw UsageError("cannot write file '" + o.get("out") + "'");
    f << payload;
  } else {
    out << payload;
  }
}

std::string outcome_name(Outcome v) {
  switch (v) {
    case Outcome::yes: return "yes";
    case Outcome::no: return "no";
    default: return "bound-exhausted";
  }
}

int outcome_exit(Outcome v) {
  switch (v) {
    case Outcome::yes: return 0;
    case Outcome::no: return 1;
    default: return 3;
  }
}

std::string factorization_text(const GentleAlgebra& alg, const Factorization& f) {
  std::ostringstream s;
  s << "  start: arc " << f.start_arc << " = " << format_string(alg, f.start) << "\n";
  for (const auto& st : f.steps)
    s << "  glue end " << st.state_end << " with arc " << st.arc << " end " << st.arc_end
      << " -> " << format_string(alg, st.result) << "\n";
  return s.str();
}

json factorization_json(const GentleAlgebra& alg, const Factorization& f) {
  json steps = json::array();
  for (const auto& st : f.steps)
    steps.push_back({{"arc", st.arc},
                     {"state_end", st.state_end},
                     {"arc_end", st.arc_end},
                     {"result", format_string(alg, st.result)}});
  return {{"start_arc", f.start_arc}, {"start", format_string(alg, f.start)}, {"steps", steps}};
}

std::string elem_text(const GentleAlgebra& alg, const AlgElem& e) {
  std::ostringstream s;
  bool first = true;
  for (const auto& [path, coeff] : e.terms) {
    if (!first) s << " + ";
    first = false;
    if (coeff != 1 || path.empty()) s << coeff;
    if (coeff != 1 && !path.empty()) s << "*";
    for (size_t i = 0; i < path.size(); ++i) s << (i ? "." : "") << alg.arrow_name(path[i]);
  }
  return first ? "0" : s.str();
}

std::string complex_text(const GentleAlgebra& alg, const ProjComplex& c) {
  if (c.zero()) return "  (zero complex)\n";
  std::ostringstream s;
  for (int k = c.levels() - 1; k >= 0; --k) {
    s << "  degree " << (c.deg_min + k) << ": ";
    for (size_t i = 0; i < c.summands[k].size(); ++i)
      s << (i ? " + " : "") << "P(" << alg.vertex_name(c.summands[k][i]) << ")";
    if (c.summands[k].empty()) s << "0";
    s << "\n";
    if (k > 0) {
      const PathMat& d = c.diffs[k - 1];
      for (int r = 0; r < d.rows; ++r)
        for (int col = 0; col < d.cols; ++col)
          if (!d.at(r, col).zero())
            s << "    d[" << r << "," << col << "] = " << elem_text(alg, d.at(r, col)) << "\n";
    }
  }
  return s.str();
}

const char* kind_name(ArcKind k) {
  switch (k) {
    case ArcKind::exceptional: return "exceptional";
    case ArcKind::spherelike: return "spherelike";
    default: return "crossing";
  }
}

// --- render helpers ----------------------------------------------------------

std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

std::string svg_open(int w, int h, bool reproducible) {
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
    << "\" viewBox=\"0 0 " << w << " " << h << "\" font-family=\"monospace\" font-size=\"12\">\n";
  if (!reproducible) {
    std::time_t now = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%d %H:%M:%S", std::gmtime(&now));
    s << "<!-- generated " << buf << " -->\n";
  }
  return s.str();
}

std::string render_complex_svg(const GentleAlgebra& alg, const ProjComplex& c, bool repro) {
  // Unfolded complex: one column per degree, boxes for summands, labeled
  // arrows for the nonzero differential entries (d lowers degree).
  int levels = std::max(c.levels(), 1);
  int max_summands = 1;
  for (const auto& s : c.summands) max_summands = std::max(max_summands, (int)s.size());
  const int col_w = 140, row_h = 60, box_w = 64, box_h = 28;
  int w = levels * col_w + 60, h = max_summands * row_h + 80;
  std::ostringstream s;
  s << svg_open(w, h, repro);
  s << "<defs><marker id=\"arr\" markerWidth=\"8\" markerHeight=\"8\" refX=\"7\" refY=\"4\" "
       "orient=\"auto\"><path d=\"M0,0 L8,4 L0,8 z\"/></marker></defs>\n";
  auto bx = [&](int level) { return 30 + (levels - 1 - level) * col_w; };
  auto by = [&](int idx) { return 50 + idx * row_h; };
  for (int k = 0; k < c.levels(); ++k) {
    s << "<text x=\"" << bx(k) + box_w / 2 << "\" y=\"30\" text-anchor=\"middle\">deg "
      << c.deg_min + k << "</text>\n";
    for (size_t i = 0; i < c.summands[k].size(); ++i) {
      s << "<rect x=\"" << bx(k) << "\" y=\"" << by((int)i) << "\" width=\"" << box_w
        << "\" height=\"" << box_h << "\" fill=\"none\" stroke=\"black\"/>\n";
      s << "<text x=\"" << bx(k) + box_w / 2 << "\" y=\"" << by((int)i) + 19
        << "\" text-anchor=\"middle\">P(" << svg_escape(alg.vertex_name(c.summands[k][i]))
        << ")</text>\n";
    }
  }
  for (int k = 0; k + 1 < c.levels(); ++k) {
    const PathMat& d = c.diffs[k];
    for (int r = 0; r < d.rows; ++r)
      for (int col = 0; col < d.cols; ++col) {
        if (d.at(r, col).zero()) continue;
        int x1 = bx(k + 1) + box_w, y1 = by(col) + box_h / 2;
        int x2 = bx(k), y2 = by(r) + box_h / 2;
        s << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\"" << y2
          << "\" stroke=\"black\" marker-end=\"url(#arr)\"/>\n";
        s << "<text x=\"" << (x1 + x2) / 2 << "\" y=\"" << (y1 + y2) / 2 - 4
          << "\" text-anchor=\"middle\">" << svg_escape(elem_text(alg, d.at(r, col)))
          << "</text>\n";
      }
  }
  s << "</svg>\n";
  return s.str();
}

std::string render_star_svg(const GentleAlgebra& alg, ArcModel& model,
                            const std::vector<Arc>& arcs, bool repro) {
  // Schematic star diagram: marked-point classes on a circle, arcs as chords
  // (a loop when both ends share a class).
  ArcModel::MarkedPoints mp = model.marked_points(arcs);
  const int w = 520, h = 520, cx = 260, cy = 260, r = 190;
  std::ostringstream s;
  s << svg_open(w, h, repro);
  auto px = [&](int cls) { return cx + r * std::cos(2 * M_PI * cls / std::max(mp.num_classes, 1)); };
  auto py = [&](int cls) { return cy + r * std::sin(2 * M_PI * cls / std::max(mp.num_classes, 1)); };
  for (int c = 0; c < mp.num_classes; ++c) {
    s << "<circle cx=\"" << px(c) << "\" cy=\"" << py(c) << "\" r=\"4\"/>\n";
    s << "<text x=\"" << px(c) + 8 << "\" y=\"" << py(c) - 8 << "\">m" << c << "</text>\n";
  }
  for (size_t i = 0; i < arcs.size(); ++i) {
    int c0 = mp.at({(int)i, 0}), c1 = mp.at({(int)i, 1});
    double x0 = px(c0), y0 = py(c0), x1 = px(c1), y1 = py(c1);
    // Bow each chord toward the center (offset per arc so parallel arcs split).
    double mxx = (x0 + x1) / 2 + (cx - (x0 + x1) / 2) * (0.25 + 0.12 * (double)i);
    double myy = (y0 + y1) / 2 + (cy - (y0 + y1) / 2) * (0.25 + 0.12 * (double)i);
    if (c0 == c1) {
      mxx = x0 + (cx - x0) * 0.7 + 24.0 * (double)i;
      myy = y0 + (cy - y0) * 0.7;
      s << "<path d=\"M" << x0 << "," << y0 << " Q" << mxx << "," << myy - 40 << " " << mxx << ","
        << myy << " Q" << mxx << "," << myy + 40 << " " << x0 << "," << y0
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    } else {
      s << "<path d=\"M" << x0 << "," << y0 << " Q" << mxx << "," << myy << " " << x1 << "," << y1
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    }
    s << "<text x=\"" << mxx << "\" y=\"" << myy - 6 << "\" text-anchor=\"middle\">"
      << svg_escape(format_string(alg, arcs[i].string)) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

struct PosetFile {
  std::vector<std::string> node_labels;
  std::vector<std::pair<int, int>> edges, unknown;
};

PosetFile parse_poset_file(const std::string& text) {
  PosetFile p;
  for (const std::string& line : list_lines(text)) {
    std::istringstream in(line);
    std::string kw;
    in >> kw;
    if (kw == "poset") continue;  // version tag
    if (kw == "node") {
      std::string idx, rest;
      in >> idx;  // "<i>:"
      std::getline(in, rest);
      size_t a = rest.find_first_not_of(" \t");
      p.node_labels.push_back(a == std::string::npos ? "" : rest.substr(a));
    } else if (kw == "edge" || kw == "unknown") {
      int a, b;
      if (!(in >> a >> b)) throw UsageError("bad poset line: " + line);
      (kw == "edge" ? p.edges : p.unknown).push_back({a, b});
    } else {
      throw UsageError("bad poset line: " + line);
    }
  }
  return p;
}

std::string render_hasse_svg(const PosetFile& p, bool repro) {
  // Layer by longest path from a minimal node.
  int n = (int)p.node_labels.size();
  std::vector<int> layer(n, 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto [lo, hi] : p.edges)
      if (layer[hi] < layer[lo] + 1) {
        layer[hi] = layer[lo] + 1;
        changed = true;
      }
  }
  int max_layer = 0;
  for (int l : layer) max_layer = std::max(max_layer, l);
  std::vector<std::vector<int>> rows(max_layer + 1);
  for (int i = 0; i < n; ++i) rows[layer[i]].push_back(i);
  size_t widest = 1;
  for (auto& r : rows) widest = std::max(widest, r.size());
  const int col_w = 200, row_h = 90, box_h = 30;
  int w = (int)widest * col_w + 40, h = (max_layer + 1) * row_h + 60;
  std::vector<std::pair<int, int>> pos(n);
  for (int l = 0; l <= max_layer; ++l)
    for (size_t j = 0; j < rows[l].size(); ++j) {
      int x = 20 + (int)j * col_w + (int)((widest - rows[l].size()) * col_w / 2);
      int y = h - 40 - l * row_h - box_h;
      pos[rows[l][j]] = {x, y};
    }
  std::ostringstream s;
  s << svg_open(w, h, repro);
  for (auto [lo, hi] : p.edges)
    s << "<line x1=\"" << pos[lo].first + 90 << "\" y1=\"" << pos[lo].second << "\" x2=\""
      << pos[hi].first + 90 << "\" y2=\"" << pos[hi].second + box_h
      << "\" stroke=\"black\"/>\n";
  for (auto [a, b] : p.unknown)
    s << "<line x1=\"" << pos[a].first + 90 << "\" y1=\"" << pos[a].second << "\" x2=\""
      << pos[b].first + 90 << "\" y2=\"" << pos[b].second + box_h
      << "\" stroke=\"gray\" stroke-dasharray=\"4\"/>\n";
  for (int i = 0; i < n; ++i) {
    s << "<rect x=\"" << pos[i].first << "\" y=\"" << pos[i].second
      << "\" width=\"180\" height=\"" << box_h << "\" fill=\"white\" stroke=\"black\"/>\n";
    s << "<text x=\"" << pos[i].first + 90 << "\" y=\"" << pos[i].second + 20
      << "\" text-anchor=\"middle\">" << svg_escape(p.node_labels[i]) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

// --- verbs ---------------------------------------------------------------------

int verb_validate(const Options& o, std::ostream& out) {
  GentleAlgebra alg = load_algebra(o);
  std::vector<Violation> v = validate_gentle(alg.quiver, alg.relations);
  std::ostringstream text;
  json j = {{"schema", "gentle.validate/1"}, {"gentle", v.empty()}};
  if (!v.empty()) {
    text << "not gentle:\n";
    json viols = json::array();
    for (const Violation& x : v) {
      text << "  " << x.clause << ": " << x.witness << "\n";
      viols.push_back({{"clause", x.clause}, {"witness", x.witness}});
    }
    j["violations"] = viols;
    emit(o, out, text.str(), j);
    return 1;
  }
  build_tables(alg);
  if (o.named.count("canonical")) {
    std::ofstream f(o.get("canonical"));
    if (!f.good()) throw UsageError("cannot write file '" + o.get("canonical") + "'");
    f << serialize_algebra(alg);
  }
  SmoothResult s = is_homologically_smooth(alg);
  j["smooth"] = s.smooth;
  if (s.smooth) {
    text << "gentle, homologically smooth\n";
    emit(o, out, text.str(), j);
    return 0;
  }
  text << "gentle, not homologically smooth; fully-related cycle:";
  json cyc = json::array();
  for (int a : s.witness_cycle) {
    text << " " << alg.arrow_name(a);
    cyc.push_back(alg.arrow_name(a));
  }
  text << "\n";
  j["witness_cycle"] = cyc;
  emit(o, out, text.str(), j);
  return 1;
}

int verb_paths(const Options& o, std::ostream& out) {
  GentleAlgebra alg = load_algebra(o);
  int v = alg.quiver.vertex_index(o.require("from"));
  int u = alg.quiver.vertex_index(o.require("to"));
  if (v < 0 || u < 0) throw UsageError("unknown vertex name");
  std::vector<Path> ps = permitted_paths(alg, v, u);
  std::ostringstream text;
  json list = json::array();
  for (const Path& p : ps) {
    text << path_to_string(alg, p) << "\n";
    list.push_back(path_to_string(alg, p));
  }
  text << "total: " << ps.size() << "\n";
  emit(o, out, text.str(),
       {{"schema", "gentle.paths/1"}, {"paths", list}, {"total", ps.size()}});
  return 0;
}

int verb_strings(const Options& o, std::ostream& out, bool bands) {
  GentleAlgebra alg = load_algebra(o);
  int max_letters = o.get_int("max-letters", 4);
  std::ostringstream text;
  json list = json::array();
  size_t n = 0;
  if (bands) {
    for (const GradedBand& b : enumerate_bands(alg, max_letters)) {
      text << format_band(alg, b) << "\n";
      list.push_back(format_band(alg, b));
      ++n;
    }
  } else {
    for (const GradedString& s : enumerate_strings(alg, max_letters)) {
      text << format_string(alg, s) << "\n";
      list.push_back(format_string(alg, s));
      ++n;
    }
  }
  text << "# total: " << n << "\n";
  emit(o, out, text.str(),
       {{"schema", bands ? "gentle.bands/1" : "gentle.strings/1"},
        {"max_letters", max_letters},
        {"classes", list},
        {"total", n}});
  return 0;
}

ProjComplex complex_of_literal(Oracle& oracle, const GentleAlgebra& alg, const std::string& lit) {
  if (is_band_literal(lit)) return oracle.of_band(normalize_band(parse_band_literal(alg, lit)));
  return oracle.of_string(parse_string_literal(alg, lit));
}

int verb_hom(const Options& o, std::ostream& out) {
  GentleAlgebra alg = load_algebra(o);
  Oracle oracle(alg, field_order(o));
  ProjComplex A = complex_of_literal(oracle, alg, o.require("from"));
  ProjComplex B = complex_of_literal(oracle, alg, o.require("to"));
  HomTable t = oracle.hom_table(A, B);
  std::ostringstream text;
  json dims = json::object();
  for (const auto& [k, d] : t.dims) {
    text << "shift " << k << ": " << d << "\n";
    dims[std::to_string(k)] = d;
  }
  text << "total: " << t.total << "\n";
  emit(o, out, text.str(), {{"schema", "gentle.hom/1"}, {"dims", dims}, {"total", t.total}});
  return 0;
}

int verb_cone(const Options& o, std::ostream& out) {
  GentleAlgebra alg = load_algebra(o);
  Oracle oracle(alg, field_order(o));
  ProjComplex A = complex_of_literal(oracle, alg, o.require("from"));
  ProjComplex B = complex_of_literal(oracle, alg, o.require("to"));
  int k = o.get_int("shift", 0);
  int idx = o.get_int("index", 0);
  ProjComplex Bk = shift(B, k, oracle.F);
  std::vector<ChainMap> basis = oracle.hom_basis(A, Bk);
  if (idx < 0 || idx >= (int)basis.size()) {
    std::ostringstream text;
    text << "no basis morphism with index " << idx << " at shift " << k << " (dim "
         << basis.size() << ")\n";
    emit(o, out, text.str(),
         {{"schema", "gentle.cone/1"}, {"dim", basis.size()}, {"found", false}});
    return 1;
  }
  ProjComplex c = oracle.cone(A, Bk, basis[idx]);
  std::ostringstream text;
  text << "hom dim at shift " << k << ": " << basis.size() << "\n";
  text << "minimal cone of basis morphism " << idx << ":\n" << complex_text(alg, c);
  emit(o, out, text.str(),
       {{"schema", "gentle.cone/1"},
        {"dim", basis.size()},
        {"found", true},
        {"cone", complex_key(alg, c)}});
  return 0;
}

int verb_classify(const Options& o, std::ostream& out) {
  GentleAlgebra alg = load_algebra(o);
  if (o.positional.size() < 2) throw UsageError("classify needs a string literal");
  ArcModel model(alg, field_order(o));
  Arc a = model.classify_arc(parse_string_literal(alg, o.positional[1]));
  std::ostringstream text;
  text << format_string(alg, a.string) << ": " << kind_name(a.kind) << "\n";
  text << "  self-hom (all shifts): " << a.self_hom << "\n";
  text << "  closed: " << (a.closed ? "yes" : "no")
       << ", self-crossings: " << a.self_crossings << "\n";
  emit(o, out, text.str(),
       {{"schema", "gentle.classify/1"},
        {"string", format_string(alg, a.string)},
        {"kind", kind_name(a.kind)},
        {"self_hom", a.self_hom},
        {"closed", a.closed},
        {"self_crossings", a.self_crossings}});
  return 0;
}

int verb_glue(const Options& o, std::ostream& out) {
  GentleAlgebra alg = load_algebra(o);
  ArcModel model(alg, field_order(o));
  GradedString s = parse_string_literal(alg, o.require("left"));
  GradedString t = parse_string_literal(alg, o.require("right"));
  int se = o.get_int("left-end", 1), te = o.get_int("right-end", 0);
  std::vector<GlueResult> rs = model.glue(s, se, t, te);
  std::ostringstream text;
  json list = json::array();
  for (const GlueResult& r : rs) {
    text << format_string(alg, r.word) << "  (cone shift " << r.shift << ")\n";
    list.push_back({{"word", format_string(alg, r.word)}, {"shift", r.shift}});
  }
  if (rs.empty()) text << "ends do not glue\n";
  emit(o, out, text.str(), {{"schema", "gentle.glue/1"}, {"results", list}});
  return rs.empty() ? 1 : 0;
}

int verb_reduce(const Options& o, std::ostream& out) {
  GentleAlgebra alg = load_algebra(o);
  ArcModel model(alg, field_order(o));
  Generators g = parse_generators(alg, collection_literals(o.require("strings")));
  if (!g.bands.empty()) throw UsageError("reduce takes string generators only");
  ArcModel::CollectionResult r = model.reduce_to_collection(g.strings);
  std::ostringstream text;
  json arcs = json::array(), trace = json::array();
  for (const Arc& a : r.arcs) {
    text << format_string(alg, a.string) << "  # " << kind_name(a.kind) << "\n";
    arcs.push_back(format_string(alg, a.string));
  }
  text << "# interior trace:";
  for (int t : r.interior_trace) {
    text << " " << t;
    trace.push_back(t);
  }
  text << "\n";
  if (r.bound_exhausted) text << "# bound exhausted\n";
  emit(o, out, text.str(),
       {{"schema", "gentle.reduce/1"},
        {"arcs", arcs},
        {"interior_trace", trace},
        {"bound_exhausted", r.bound_exhausted}});
  return r.bound_exhausted ? 3 : 0;
}

std::vector<Arc> classify_all(ArcModel& model, const std::vector<GradedString>& ss) {
  std::vector<Arc> arcs;
  for (const GradedString& s : ss) arcs.push_back(model.classify_arc(s));
  return arcs;
}

int verb_pointed(const Options& o, std::ostream& out) {
  GentleAlgebra alg = load_algebra(o);
  ArcModel model(alg, field_order(o));
  Generators g = parse_generators(alg, collection_literals(o.require("collection")));
  std::vector<Arc> arcs = classify_all(model, g.strings);
  ArcModel::PointedCollection p = model.to_pointed(arcs, o.get_int("point", 0));
  std::ostringstream text;
  json jarcs = json::array(), jrw = json::array();
  text << "basepoint class: m" << p.basepoint << "\n";
  for (const Arc& a : p.arcs) {
    text << format_string(alg, a.string) << "\n";
    jarcs.push_back(format_string(alg, a.string));
  }
  for (const std::string& r : p.rewrites) {
    text << "  rewrite: " << r << "\n";
    jrw.push_back(r);
  }
  emit(o, out, text.str(),
       {{"schema", "gentle.pointed/1"},
        {"basepoint", p.basepoint},
        {"arcs", jarcs},
        {"rewrites", jrw}});
  return 0;
}

int verb_regions(const Options& o, std::ostream& out) {
  GentleAlgebra alg = load_algebra(o);
  ArcModel model(alg, field_order(o));
  Generators g = parse_generators(alg, collection_literals(o.require("collection")));
  std::vector<Arc> arcs = classify_all(model, g.strings);
  ArcModel::PointedCollection p = model.to_pointed(arcs, o.get_int("point", 0));
  ArcModel::Regions r = model.regions_and_tau(p);
  std::ostringstream text;
  text << "half-edges at v:";
  json order = json::array();
  for (const EndRef& e : r.order) {
    text << " (arc " << e.arc << ", end " << e.end << ")";
    order.push_back({{"arc", e.arc}, {"end", e.end}});
  }
  text << "\nregions:\n";
  json kinds = json::array(), tau = json::object(), psi = json::array();
  for (int i = 0; i < r.num_regions; ++i) {
    const char* kind = r.kinds[i] == RegionKind::terminal     ? "terminal"
                       : r.kinds[i] == RegionKind::cyclic     ? "cyclic"
                                                              : "terminating";
    text << "  R" << i << ": " << kind;
    kinds.push_back(kind);
    auto it = r.tau.find(i);
    if (it != r.tau.end()) {
      text << ", tau -> R" << it->second;
      tau[std::to_string(i)] = it->second;
    }
    if (r.kinds[i] != RegionKind::terminal) {
      ArcModel::PsiPath pp = model.psi_path(p, r, i);
      const char* tag = pp.tag == LoopTag::string_arc   ? "string-arc"
                        : pp.tag == LoopTag::band       ? "band"
                                                        : "ungraded-loop";
      text << ", psi = " << format_string(alg, pp.word) << " [" << tag << "]";
      psi.push_back({{"region", i}, {"word", format_string(alg, pp.word)}, {"tag", tag}});
    }
    text << "\n";
  }
  emit(o, out, text.str(),
       {{"schema", "gentle.regions/1"},
        {"order", order},
        {"kinds", kinds},
        {"tau", tau},
        {"psi", psi}});
  return 0;
}

int verb_member(const Options& o, std::ostream& out) {
  GentleAlgebra alg = load_algebra(o);
  ThickPoset tp(alg, field_order(o));
  GradedString target = parse_string_literal(alg, o.require("target"));
  Generators g = parse_generators(alg, collection_literals(o.require("collection")));
  if (!g.bands.empty()) throw UsageError("member takes a string collection (run eliminate-bands first)");
  Generated r = tp.is_generated(target, g.strings, o.get_int("max-depth", -1));
  std::ostringstream text;
  json j = {{"schema", "gentle.member/1"}, {"outcome", outcome_name(r.outcome)}};
  if (r.outcome == Outcome::yes) {
    text << "generated; factorization:\n" << factorization_text(alg, *r.factorization);
    bool ok = tp.verify(*r.factorization, g.strings, target);
    text << "  certificate replay: " << (ok ? "ok" : "FAILED") << "\n";
    j["factorization"] = factorization_json(alg, *r.factorization);
    j["verified"] = ok;
  } else if (r.outcome == Outcome::no) {
    text << "not generated: " << r.reason << "\n";
    j["reason"] = r.reason;
  } else {
    text << "bound exhausted (undecided)\n";
  }
  emit(o, out, text.str(), j);
  return outcome_exit(r.outcome);
}

int verb_leq(const Options& o, std::ostream& out, bool equiv) {
  GentleAlgebra alg = load_algebra(o);
  ThickPoset tp(alg, field_order(o));
  Generators a = parse_generators(alg, collection_literals(o.require("left")));
  Generators b = parse_generators(alg, collection_literals(o.require("right")));
  if (!a.bands.empty() || !b.bands.empty()) throw UsageError("collections must be string-only");
  int bound = o.get_int("max-depth", -1);
  std::ostringstream text;
  if (equiv) {
    Outcome r = tp.equiv_gen(a.strings, b.strings, bound);
    text << "equivalent: " << outcome_name(r) << "\n";
    emit(o, out, text.str(), {{"schema", "gentle.equiv/1"}, {"outcome", outcome_name(r)}});
    return outcome_exit(r);
  }
  LeqResult r = tp.leq_gen(a.strings, b.strings, bound);
  json j = {{"schema", "gentle.leq/1"}, {"outcome", outcome_name(r.outcome)}};
  text << "left <= right: " << outcome_name(r.outcome) << "\n";
  if (r.outcome == Outcome::yes) {
    json certs = json::array();
    for (size_t i = 0; i < r.certificates.size(); ++i) {
      text << "arc " << i << " (" << format_string(alg, a.strings[i]) << "):\n"
           << factorization_text(alg, r.certificates[i]);
      certs.push_back(factorization_json(alg, r.certificates[i]));
    }
    j["certificates"] = certs;
  } else if (!r.reason.empty()) {
    text << "reason: " << r.reason << "\n";
    j["reason"] = r.reason;
  }
  emit(o, out, text.str(), j);
  return outcome_exit(r.outcome);
}

int verb_eliminate_bands(const Options& o, std::ostream& out) {
  GentleAlgebra alg = load_algebra(o);
  ThickPoset tp(alg, field_order(o));
  Generators g = parse_generators(alg, collection_literals(o.require("collection")));
  BandElimination r = tp.eliminate_bands(g.strings, g.bands, o.get_int("max-letters", 8));
  std::ostringstream text;
  json j = {{"schema", "gentle.eliminate-bands/1"}};
  if (r.no_string_present) {
    text << "no string object in the generated subcategory; bands kept\n";
    j["no_string_present"] = true;
    emit(o, out, text.str(), j);
    return 1;
  }
  j["no_string_present"] = false;
  j["bound_exhausted"] = r.bound_exhausted;
  json strs = json::array(), certs = json::array();
  for (const GradedString& s : r.strings) {
    text << format_string(alg, s) << "\n";
    strs.push_back(format_string(alg, s));
  }
  for (const std::string& c : r.certificates) {
    text << "  certificate: " << c << "\n";
    certs.push_back(c);
  }
  if (r.bound_exhausted) text << "bound exhausted\n";
  j["strings"] = strs;
  j["certificates"] = certs;
  emit(o, out, text.str(), j);
  return r.bound_exhausted ? 3 : 0;
}

int verb_poset(const Options& o, std::ostream& out) {
  GentleAlgebra alg = load_algebra(o);
  ThickPoset tp(alg, field_order(o));
  int letters = o.get_int("max-letters", 2);
  int max_arcs = o.get_int("max-arcs", 4);
  ThickPoset::Poset p = tp.build_poset(letters, max_arcs, o.get_int("max-depth", -1));
  auto label = [&](const std::vector<GradedString>& c) {
    std::string s;
    for (size_t i = 0; i < c.size(); ++i) s += (i ? "; " : "") + format_string(alg, c[i]);
    return s;
  };
  std::ostringstream text;
  text << "poset 1\n";
  json nodes = json::array(), edges = json::array(), unknown = json::array();
  for (size_t i = 0; i < p.nodes.size(); ++i) {
    text << "node " << i << ": " << label(p.nodes[i].rep) << "\n";
    json members = json::array();
    for (const auto& m : p.nodes[i].members) members.push_back(label(m));
    nodes.push_back({{"rep", label(p.nodes[i].rep)}, {"members", members}});
    if (o.flags.count("members"))
      for (const auto& m : p.nodes[i].members) text << "# member " << i << ": " << label(m) << "\n";
  }
  for (auto [a, b] : p.edges) {
    text << "edge " << a << " " << b << "\n";
    edges.push_back({a, b});
  }
  for (auto [a, b] : p.unknown) {
    text << "unknown " << a << " " << b << "\n";
    unknown.push_back({a, b});
  }
  emit(o, out, text.str(),
       {{"schema", "gentle.poset/1"},
        {"max_letters", letters},
        {"max_arcs", max_arcs},
        {"nodes", nodes},
        {"edges", edges},
        {"unknown", unknown}});
  return p.unknown.empty() ? 0 : 3;
}

int verb_render(const Options& o, std::ostream& out) {
  bool repro = o.flags.count("reproducible");
  std::string svg;
  if (o.named.count("poset")) {
    svg = render_hasse_svg(parse_poset_file(read_file(o.get("poset"))), repro);
  } else if (o.named.count("string")) {
    GentleAlgebra alg = load_algebra(o);
    Oracle oracle(alg, field_order(o));
    svg = render_complex_svg(alg, complex_of_literal(oracle, alg, o.get("string")), repro);
  } else if (o.named.count("collection")) {
    GentleAlgebra alg = load_algebra(o);
    ArcModel model(alg, field_order(o));
    Generators g = parse_generators(alg, collection_literals(o.get("collection")));
    svg = render_star_svg(alg, model, classify_all(model, g.strings), repro);
  } else {
    throw UsageError("render needs --poset, --string, or --collection");
  }
  if (o.named.count("out")) {
    std::ofstream f(o.get("out"));
    if (!f.good()) throw UsageError("cannot write file '" + o.get("out") + "'");
    f << svg;
  } else {
    out << svg;
  }
  return 0;
}

const char* kUsage =
    "usage: gentle <verb> <file.alg> [options]\n"
    "verbs:\n"
    "  validate <f.alg> [--canonical out.alg]\n"
    "  paths <f.alg> --from <vertex> --to <vertex>\n"
    "  strings|bands <f.alg> [--max-letters N]\n"
    "  hom <f.alg> --from <literal> --to <literal>\n"
    "  cone <f.alg> --from <literal> --to <literal> [--shift K] [--index I]\n"
    "  classify <f.alg> <string-literal>\n"
    "  glue <f.alg> --left <s> --right <t> [--left-end 0|1] [--right-end 0|1]\n"
    "  reduce <f.alg> --strings <file.str | 'a; b'>\n"
    "  pointed|regions <f.alg> --collection <file.coll | 'a; b'> [--point K]\n"
    "  member <f.alg> --target <s> --collection <...> [--max-depth N]\n"
    "  leq|equiv <f.alg> --left <...> --right <...> [--max-depth N]\n"
    "  eliminate-bands <f.alg> --collection <...> [--max-letters N]\n"
    "  poset <f.alg> [--max-letters N] [--max-arcs N] [--members]\n"
    "  render [f.alg] --poset <p> | --string <s> | --collection <c> [--reproducible]\n"
    "common: --format=json, --field P (or GENTLE_FIELD), --out FILE\n"
    "exit codes: 0 ok, 1 semantic negative, 2 usage/parse, 3 bound exhausted\n";

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  try {
    o = parse_args(args);
    if (o.verb == "help" || o.verb == "--help") {
      out << kUsage;
      return 0;
    }
    if (o.verb == "validate") return verb_validate(o, out);
    if (o.verb == "paths") return verb_paths(o, out);
    if (o.verb == "strings") return verb_strings(o, out, false);
    if (o.verb == "bands") return verb_strings(o, out, true);
    if (o.verb == "hom") return verb_hom(o, out);
    if (o.verb == "cone") return verb_cone(o, out);
    if (o.verb == "classify") return verb_classify(o, out);
    if (o.verb == "glue") return verb_glue(o, out);
    if (o.verb == "reduce") return verb_reduce(o, out);
    if (o.verb == "pointed") return verb_pointed(o, out);
    if (o.verb == "regions") return verb_regions(o, out);
    if (o.verb == "member") return verb_member(o, out);
    if (o.verb == "leq") return verb_leq(o, out, false);
    if (o.verb == "equiv") return verb_leq(o, out, true);
    if (o.verb == "eliminate-bands") return verb_eliminate_bands(o, out);
    if (o.verb == "poset") return verb_poset(o, out);
    if (o.verb == "render") return verb_render(o, out);
    throw UsageError("unknown verb '" + o.verb + "'");
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << kUsage;
    return 2;
  } catch (const ParseError& e) {
    err << "parse error (line " << e.line << "): " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ModelError& e) {
    err << "model error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace gentle
