#include "gentle/algebra.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>

namespace gentle {

int Quiver::vertex_index(const std::string& name) const {
  for (size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i] == name) return static_cast<int>(i);
  return -1;
}

int Quiver::arrow_index(const std::string& name) const {
  for (size_t i = 0; i < arrows.size(); ++i)
    if (arrows[i].name == name) return static_cast<int>(i);
  return -1;
}

bool GentleAlgebra::forbidden(int a, int b) const {
  for (const Relation& r : relations)
    if (r.first == a && r.second == b) return true;
  return false;
}

std::string path_to_string(const GentleAlgebra& alg, const Path& p) {
  if (p.trivial()) return "e_" + alg.vertex_name(p.base_vertex);
  std::string s;
  for (size_t i = 0; i < p.arrows.size(); ++i) {
    if (i) s += ".";
    s += alg.arrow_name(p.arrows[i]);
  }
  return s;
}

// --- parsing ----------------------------------------------------------------

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string strip_comment(const std::string& line) {
  size_t h = line.find('#');
  return h == std::string::npos ? line : line.substr(0, h);
}

// Structural checks shared by the text and JSON readers.
void check_structure(const Quiver& q, const std::vector<Relation>& rels, int line) {
  std::set<std::string> vnames(q.vertices.begin(), q.vertices.end());
  if (vnames.size() != q.vertices.size()) throw ParseError(line, "duplicate vertex name");
  std::set<std::string> anames;
  for (const Arrow& a : q.arrows) {
    if (!anames.insert(a.name).second) throw ParseError(line, "duplicate arrow name: " + a.name);
    if (a.source < 0 || a.target < 0) throw ParseError(line, "arrow references undeclared vertex");
  }
  std::set<std::pair<int, int>> seen;
  for (const Relation& r : rels) {
    if (r.first < 0 || r.second < 0) throw ParseError(line, "relation references undeclared arrow");
    if (q.arrows[r.first].target != q.arrows[r.second].source)
      throw ParseError(line, "non-composable relation: " + q.arrows[r.first].name + " " +
                                 q.arrows[r.second].name);
    if (!seen.insert({r.first, r.second}).second)
      throw ParseError(line, "duplicate relation: " + q.arrows[r.first].name + " " +
                                 q.arrows[r.second].name);
  }
  // Connectivity of the underlying undirected graph (required by the definition).
  if (!q.vertices.empty()) {
    std::vector<char> vis(q.vertices.size(), 0);
    std::queue<int> bfs;
    bfs.push(0);
    vis[0] = 1;
    while (!bfs.empty()) {
      int v = bfs.front();
      bfs.pop();
      for (const Arrow& a : q.arrows) {
        for (int w : {a.source == v ? a.target : -1, a.target == v ? a.source : -1})
          if (w >= 0 && !vis[w]) {
            vis[w] = 1;
            bfs.push(w);
          }
      }
    }
    for (size_t i = 0; i < vis.size(); ++i)
      if (!vis[i]) throw ParseError(line, "quiver is disconnected (vertex " + q.vertices[i] + ")");
  }
}

GentleAlgebra finish(Quiver q, std::vector<Relation> rels) {
  check_structure(q, rels, 0);
  std::sort(rels.begin(), rels.end(), [](const Relation& x, const Relation& y) {
    return std::tie(x.first, x.second) < std::tie(y.first, y.second);
  });
  GentleAlgebra alg;
  alg.quiver = std::move(q);
  alg.relations = std::move(rels);
  // Derived tables are only meaningful for gentle algebras; build them when
  // the checks pass and leave them empty otherwise (validate_gentle reports why).
  if (validate_gentle(alg.quiver, alg.relations).empty()) build_tables(alg);
  return alg;
}

}  // namespace

GentleAlgebra parse_algebra(const std::string& text) {
  Quiver q;
  std::vector<Relation> rels;
  enum class Section { none, vertices, arrows, relations } sec = Section::none;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = strip_comment(raw);
    std::vector<std::string> toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks[0] == "vertices:") {
      sec = Section::vertices;
      for (size_t i = 1; i < toks.size(); ++i) q.vertices.push_back(toks[i]);
      continue;
    }
    if (toks[0] == "arrows:") {
      sec = Section::arrows;
      continue;
    }
    if (toks[0] == "relations:") {
      sec = Section::relations;
      continue;
    }
    switch (sec) {
      case Section::vertices:
        for (const std::string& t : toks) q.vertices.push_back(t);
        break;
      case Section::arrows: {
        // name: source -> target
        if (toks.size() != 4 || toks[2] != "->" || toks[0].back() != ':')
          throw ParseError(lineno, "expected `name: source -> target`");
        Arrow a;
        a.name = toks[0].substr(0, toks[0].size() - 1);
        a.source = q.vertex_index(toks[1]);
        a.target = q.vertex_index(toks[3]);
        if (a.source < 0) throw ParseError(lineno, "undeclared vertex: " + toks[1]);
        if (a.target < 0) throw ParseError(lineno, "undeclared vertex: " + toks[3]);
        q.arrows.push_back(a);
        break;
      }
      case Section::relations: {
        if (toks.size() != 2) throw ParseError(lineno, "expected `first second` arrow pair");
        Relation r;
        r.first = q.arrow_index(toks[0]);
        r.second = q.arrow_index(toks[1]);
        if (r.first < 0) throw ParseError(lineno, "undeclared arrow: " + toks[0]);
        if (r.second < 0) throw ParseError(lineno, "undeclared arrow: " + toks[1]);
        if (q.arrows[r.first].target != q.arrows[r.second].source)
          throw ParseError(lineno, "non-composable relation: " + toks[0] + " " + toks[1]);
        rels.push_back(r);
        break;
      }
      case Section::none:
        throw ParseError(lineno, "content before any section header");
    }
  }
  return finish(std::move(q), std::move(rels));
}

GentleAlgebra algebra_from_json(const nlohmann::json& j) {
  Quiver q;
  std::vector<Relation> rels;
  for (const auto& v : j.at("vertices")) q.vertices.push_back(v.get<std::string>());
  for (const auto& a : j.at("arrows")) {
    Arrow ar;
    ar.name = a.at("name").get<std::string>();
    ar.source = q.vertex_index(a.at("source").get<std::string>());
    ar.target = q.vertex_index(a.at("target").get<std::string>());
    if (ar.source < 0 || ar.target < 0) throw ParseError(0, "undeclared vertex in arrow " + ar.name);
    q.arrows.push_back(ar);
  }
  for (const auto& r : j.at("relations")) {
    Relation rel;
    rel.first = q.arrow_index(r.at(0).get<std::string>());
    rel.second = q.arrow_index(r.at(1).get<std::string>());
    if (rel.first < 0 || rel.second < 0) throw ParseError(0, "undeclared arrow in relation");
    rels.push_back(rel);
  }
  return finish(std::move(q), std::move(rels));
}

std::string serialize_algebra(const GentleAlgebra& alg) {
  // Canonical form: vertices, arrows and relations sorted by name.
  std::vector<std::string> verts = alg.quiver.vertices;
  std::sort(verts.begin(), verts.end());
  std::ostringstream out;
  out << "vertices:";
  for (const std::string& v : verts) out << " " << v;
  out << "\narrows:\n";
  std::vector<const Arrow*> arrows;
  for (const Arrow& a : alg.quiver.arrows) arrows.push_back(&a);
  std::sort(arrows.begin(), arrows.end(),
            [](const Arrow* x, const Arrow* y) { return x->name < y->name; });
  for (const Arrow* a : arrows)
    out << "  " << a->name << ": " << alg.quiver.vertices[a->source] << " -> "
        << alg.quiver.vertices[a->target] << "\n";
  out << "relations:\n";
  std::vector<std::pair<std::string, std::string>> rels;
  for (const Relation& r : alg.relations)
    rels.push_back({alg.arrow_name(r.first), alg.arrow_name(r.second)});
  std::sort(rels.begin(), rels.end());
  for (const auto& [x, y] : rels) out << "  " << x << " " << y << "\n";
  return out.str();
}

nlohmann::json algebra_to_json(const GentleAlgebra& alg) {
  nlohmann::json j;
  std::vector<std::string> verts = alg.quiver.vertices;
  std::sort(verts.begin(), verts.end());
  j["vertices"] = verts;
  std::vector<const Arrow*> arrows;
  for (const Arrow& a : alg.quiver.arrows) arrows.push_back(&a);
  std::sort(arrows.begin(), arrows.end(),
            [](const Arrow* x, const Arrow* y) { return x->name < y->name; });
  j["arrows"] = nlohmann::json::array();
  for (const Arrow* a : arrows)
    j["arrows"].push_back({{"name", a->name},
                           {"source", alg.quiver.vertices[a->source]},
                           {"target", alg.quiver.vertices[a->target]}});
  std::vector<std::pair<std::string, std::string>> rels;
  for (const Relation& r : alg.relations)
    rels.push_back({alg.arrow_name(r.first), alg.arrow_name(r.second)});
  std::sort(rels.begin(), rels.end());
  j["relations"] = nlohmann::json::array();
  for (const auto& [x, y] : rels) j["relations"].push_back({x, y});
  return j;
}

// --- gentle validation --------------------------------------------------------

std::vector<Violation> validate_gentle(const Quiver& quiver, const std::vector<Relation>& relations) {
  std::vector<Violation> out;
  auto forb = [&](int a, int b) {
    for (const Relation& r : relations)
      if (r.first == a && r.second == b) return true;
    return false;
  };
  int nv = static_cast<int>(quiver.vertices.size());
  int na = static_cast<int>(quiver.arrows.size());
  // Clauses 1 and 2: at most two arrows out of / into each vertex.
  for (int v = 0; v < nv; ++v) {
    int out_deg = 0, in_deg = 0;
    for (const Arrow& a : quiver.arrows) {
      out_deg += a.source == v;
      in_deg += a.target == v;
    }
    if (out_deg > 2) out.push_back({"at most two arrows with source v", quiver.vertices[v]});
    if (in_deg > 2) out.push_back({"at most two arrows with target v", quiver.vertices[v]});
  }
  // Clauses 3-6: unique permitted / forbidden successor and predecessor.
  for (int a = 0; a < na; ++a) {
    std::vector<int> perm_s, forb_s, perm_p, forb_p;
    for (int b = 0; b < na; ++b) {
      if (quiver.arrows[a].target == quiver.arrows[b].source)
        (forb(a, b) ? forb_s : perm_s).push_back(b);
      if (quiver.arrows[b].target == quiver.arrows[a].source)
        (forb(b, a) ? forb_p : perm_p).push_back(b);
    }
    auto names = [&](const std::vector<int>& ix) {
      std::string s = quiver.arrows[a].name + ":";
      for (int b : ix) s += " " + quiver.arrows[b].name;
      return s;
    };
    if (perm_s.size() > 1) out.push_back({"at most one arrow c such that ac not in I", names(perm_s)});
    if (forb_s.size() > 1) out.push_back({"at most one arrow b such that ab in I", names(forb_s)});
    if (perm_p.size() > 1) out.push_back({"at most one arrow c such that ca not in I", names(perm_p)});
    if (forb_p.size() > 1) out.push_back({"at most one arrow b such that ba in I", names(forb_p)});
  }
  // Admissibility: a cycle of permitted compositions would make the ideal
  // non-admissible (arbitrarily long permitted paths).
  {
    // Walk the functional "unique permitted successor" graph when it is
    // functional; otherwise generic DFS over permitted compositions.
    std::vector<int> color(na, 0);
    std::vector<int> stack;
    std::function<bool(int)> dfs = [&](int a) -> bool {
      color[a] = 1;
      stack.push_back(a);
      for (int b = 0; b < na; ++b) {
        if (quiver.arrows[a].target != quiver.arrows[b].source || forb(a, b)) continue;
        if (color[b] == 1) {
          // Report the cycle portion for the witness.
          std::string w;
          for (size_t i = 0; i < stack.size(); ++i)
            if (stack[i] == b || !w.empty()) w += (w.empty() ? "" : " ") + quiver.arrows[stack[i]].name;
          out.push_back({"admissibility: permitted cycle", w});
          return true;
        }
        if (color[b] == 0 && dfs(b)) return true;
      }
      stack.pop_back();
      color[a] = 2;
      return false;
    };
    for (int a = 0; a < na && out.empty(); ++a)
      if (color[a] == 0 && dfs(a)) break;
  }
  return out;
}

void build_tables(GentleAlgebra& alg) {
  std::vector<Violation> v = validate_gentle(alg.quiver, alg.relations);
  if (!v.empty()) throw std::runtime_error("not a gentle algebra: " + v.front().clause);
  int na = alg.num_arrows();
  alg.perm_succ.assign(na, -1);
  alg.forb_succ.assign(na, -1);
  alg.perm_pred.assign(na, -1);
  alg.forb_pred.assign(na, -1);
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < na; ++b) {
      if (alg.tgt(a) == alg.src(b)) {
        if (alg.forbidden(a, b)) {
          alg.forb_succ[a] = b;
          alg.forb_pred[b] = a;
        } else {
          alg.perm_succ[a] = b;
          alg.perm_pred[b] = a;
        }
      }
    }
  // Longest permitted path: walk each chain of permitted successors; the
  // admissibility check above guarantees these chains are acyclic.
  alg.longest_permitted = 0;
  for (int a = 0; a < na; ++a) {
    int len = 1, cur = a;
    while (alg.perm_succ[cur] >= 0) {
      cur = alg.perm_succ[cur];
      ++len;
      if (len > na + 1) throw std::runtime_error("permitted cycle slipped past admissibility check");
    }
    alg.longest_permitted = std::max(alg.longest_permitted, len);
  }
}

std::vector<Path> permitted_paths(const GentleAlgebra& alg, int v, int u) {
  std::vector<Path> out;
  if (v == u) out.push_back(Path{{}, v});
  // DFS over relation-free extensions; bounded by admissibility.
  std::vector<int> cur;
  std::function<void(int)> dfs = [&](int at) {
    if (static_cast<int>(cur.size()) > alg.num_arrows() + 1)
      throw std::runtime_error("permitted path search exceeded admissibility bound");
    for (int b = 0; b < alg.num_arrows(); ++b) {
      if (alg.src(b) != at) continue;
      if (!cur.empty() && alg.forbidden(cur.back(), b)) continue;
      cur.push_back(b);
      if (alg.tgt(b) == u) out.push_back(Path{cur, -1});
      dfs(alg.tgt(b));
      cur.pop_back();
    }
  };
  dfs(v);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Path> all_permitted_paths(const GentleAlgebra& alg) {
  std::vector<Path> out;
  for (int v = 0; v < alg.num_vertices(); ++v)
    for (int u = 0; u < alg.num_vertices(); ++u) {
      std::vector<Path> ps = permitted_paths(alg, v, u);
      out.insert(out.end(), ps.begin(), ps.end());
    }
  return out;
}

SmoothResult is_homologically_smooth(const GentleAlgebra& alg) {
  // A violating cycle c_1..c_n has every cyclic composition (c_i, c_{i+1}) in I,
  // so it lives entirely inside the "forbidden successor" functional graph.
  // Follow forb_succ from every arrow and look for a cycle.
  SmoothResult res;
  int na = alg.num_arrows();
  for (int a = 0; a < na; ++a) {
    std::vector<int> seen_at(na, -1);
    int cur = a, step = 0;
    while (cur >= 0 && seen_at[cur] < 0) {
      seen_at[cur] = step++;
      cur = alg.forb_succ[cur];
    }
    if (cur >= 0) {
      // Found a forbidden-composition cycle starting at `cur`.
      res.smooth = false;
      res.witness_cycle.clear();
      int x = cur;
      do {
        res.witness_cycle.push_back(x);
        x = alg.forb_succ[x];
      } while (x != cur);
      return res;
    }
  }
  return res;
}

}  // namespace gentle
