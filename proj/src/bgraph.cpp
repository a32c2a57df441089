#include "stlab/bgraph.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "stlab/errors.hpp"

namespace stlab {

long long BGraph::edge_count() const {
  long long n = 0;
  for (auto& es : edges) n += static_cast<long long>(es.size());
  return n;
}

void BGraph::add_edge(int letter, int src, int tgt) {
  if (letter < 0 || letter >= letters()) throw precondition_error("bad letter");
  if (src < 0 || src >= nv || tgt < 0 || tgt >= nv) throw precondition_error("bad vertex");
  edges[letter].emplace_back(src, tgt);
}

bool BGraph::folded() const {
  for (auto& es : edges) {
    std::set<int> srcs, tgts;
    for (auto& [s, t] : es) {
      if (!srcs.insert(s).second) return false;
      if (!tgts.insert(t).second) return false;
    }
  }
  return true;
}

std::optional<int> BGraph::out_edge(int v, int letter) const {
  auto& es = edges[letter];
  for (size_t i = 0; i < es.size(); ++i)
    if (es[i].first == v) return static_cast<int>(i);
  return std::nullopt;
}

std::optional<int> BGraph::in_edge(int v, int letter) const {
  auto& es = edges[letter];
  for (size_t i = 0; i < es.size(); ++i)
    if (es[i].second == v) return static_cast<int>(i);
  return std::nullopt;
}

int BGraph::degree(int v) const {
  int d = 0;
  for (auto& es : edges)
    for (auto& [s, t] : es) {
      if (s == v) ++d;
      if (t == v) ++d;
    }
  return d;
}

std::vector<int> BGraph::component_ids() const {
  std::vector<int> comp(nv, -1);
  int next = 0;
  for (int start = 0; start < nv; ++start) {
    if (comp[start] >= 0) continue;
    comp[start] = next;
    std::queue<int> q;
    q.push(start);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (auto& es : edges)
        for (auto& [s, t] : es) {
          if (s == v && comp[t] < 0) { comp[t] = next; q.push(t); }
          if (t == v && comp[s] < 0) { comp[s] = next; q.push(s); }
        }
    }
    ++next;
  }
  return comp;
}

int BGraph::component_count() const {
  auto c = component_ids();
  return c.empty() ? 0 : 1 + *std::max_element(c.begin(), c.end());
}

bool BGraph::connected() const { return component_count() == 1; }

long long BGraph::component_rank(int v) const {
  auto comp = component_ids();
  long long nverts = 0, nedges = 0;
  for (int u = 0; u < nv; ++u)
    if (comp[u] == comp[v]) ++nverts;
  for (auto& es : edges)
    for (auto& [s, t] : es)
      if (comp[s] == comp[v]) ++nedges;
  return 1 - (nverts - nedges);
}

long long BGraph::rank() const {
  if (!connected()) throw precondition_error("rank: graph not connected");
  return 1 - chi();
}

std::optional<int> BGraph::walk(int v, const Word& w) const {
  int cur = v;
  for (auto& [l, sign] : w.syl) {
    std::optional<int> e = sign > 0 ? out_edge(cur, l) : in_edge(cur, l);
    if (!e) return std::nullopt;
    cur = sign > 0 ? edges[l][*e].second : edges[l][*e].first;
  }
  return cur;
}

namespace {

// Canonical BFS encoding of the component containing start, with start as the
// first vertex. Well-defined because folded graphs are deterministic; also
// fine on unfolded graphs via sorted adjacency multisets.
std::string component_encoding(const BGraph& g, int start) {
  std::vector<int> num(g.nv, -1);
  std::vector<int> order;
  num[start] = 0;
  order.push_back(start);
  std::string enc;
  for (size_t qi = 0; qi < order.size(); ++qi) {
    int v = order[qi];
    for (int l = 0; l < g.letters(); ++l) {
      std::vector<std::pair<int, int>> inc;  // (direction, other vertex), sorted
      for (auto& [s, t] : g.edges[l]) {
        if (s == v) inc.emplace_back(0, t);
        if (t == v) inc.emplace_back(1, s);
      }
      // Discover in a deterministic order.
      std::sort(inc.begin(), inc.end(), [&](auto& a, auto& b) {
        auto key = [&](const std::pair<int, int>& p) {
          return std::pair<int, int>(p.first, num[p.second] < 0 ? 1 << 29 : num[p.second]);
        };
        return key(a) < key(b);
      });
      for (auto& [dir, u] : inc) {
        if (num[u] < 0) {
          num[u] = static_cast<int>(order.size());
          order.push_back(u);
        }
        enc += std::to_string(l) + (dir == 0 ? ">" : "<") + std::to_string(num[u]) + ",";
      }
      enc += ";";
    }
    enc += "|";
  }
  return enc;
}

}  // namespace

std::string BGraph::canonical_encoding() const {
  auto comp = component_ids();
  int ncomp = component_count();
  std::vector<std::string> encs;
  for (int c = 0; c < ncomp; ++c) {
    bool has_bp = basepoint >= 0 && comp[basepoint] == c;
    std::string best;
    if (has_bp) {
      best = "B:" + component_encoding(*this, basepoint);
    } else {
      for (int v = 0; v < nv; ++v) {
        if (comp[v] != c) continue;
        std::string e = component_encoding(*this, v);
        if (best.empty() || e < best) best = e;
      }
    }
    encs.push_back(best);
  }
  std::sort(encs.begin(), encs.end());
  std::string out = "V" + std::to_string(nv) + "#";
  for (auto& e : encs) out += e + "##";
  return out;
}

bool isomorphic(const BGraph& a, const BGraph& b) {
  if (!(a.alphabet == b.alphabet)) return false;
  return a.canonical_encoding() == b.canonical_encoding();
}

// --- construction -----------------------------------------------------------

BGraph bouquet(const Alphabet& a) {
  BGraph g(a, 1, 0);
  for (int l = 0; l < g.letters(); ++l) g.add_edge(l, 0, 0);
  return g;
}

namespace {

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    p[b] = a;
    return true;
  }
};

}  // namespace

std::vector<int> fold_graph(BGraph& g) {
  UnionFind uf(g.nv);
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& es : g.edges) {
      std::map<int, int> by_src, by_tgt;
      for (auto& [s, t] : es) {
        int fs = uf.find(s), ft = uf.find(t);
        auto it = by_src.find(fs);
        if (it == by_src.end())
          by_src[fs] = ft;
        else if (uf.unite(it->second, ft))
          changed = true;
        it = by_tgt.find(ft);
        if (it == by_tgt.end())
          by_tgt[ft] = fs;
        else if (uf.unite(it->second, fs))
          changed = true;
      }
      if (changed) break;  // class ids moved; rescan from scratch
    }
  }
  // Renumber classes by first occurrence.
  std::vector<int> vmap(g.nv, -1);
  int next = 0;
  for (int v = 0; v < g.nv; ++v) {
    int r = uf.find(v);
    if (vmap[r] < 0) vmap[r] = next++;
    vmap[v] = vmap[r];
  }
  BGraph out(g.alphabet, next, g.basepoint >= 0 ? vmap[g.basepoint] : -1);
  for (int l = 0; l < g.letters(); ++l) {
    std::set<std::pair<int, int>> seen;
    for (auto& [s, t] : g.edges[l]) {
      std::pair<int, int> e(vmap[s], vmap[t]);
      if (seen.insert(e).second) out.edges[l].push_back(e);
    }
  }
  g = std::move(out);
  return vmap;
}

BGraph fold_words(const std::vector<Word>& words, const Alphabet& a) {
  BGraph g(a, 1, 0);
  for (auto& w : words) {
    int prev = 0;
    for (size_t i = 0; i < w.syl.size(); ++i) {
      int next = (i + 1 == w.syl.size()) ? 0 : g.nv;
      if (next == g.nv) {
        g.nv += 1;
        // (edges vectors unchanged; vertex count grows)
      }
      auto [l, sign] = w.syl[i];
      if (sign > 0)
        g.add_edge(l, prev, next);
      else
        g.add_edge(l, next, prev);
      prev = next;
    }
  }
  fold_graph(g);
  return core(g, /*keep_basepoint=*/true).graph;
}

BGraph fold_strings(const std::vector<std::string>& words, const Alphabet& a) {
  std::vector<Word> ws;
  for (auto& s : words) ws.push_back(Word::parse(s, a));
  return fold_words(ws, a);
}

CoreResult core(const BGraph& g, bool keep_basepoint) {
  std::vector<char> alive(g.nv, 1);
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<int> deg(g.nv, 0);
    for (auto& es : g.edges)
      for (auto& [s, t] : es)
        if (alive[s] && alive[t]) { ++deg[s]; ++deg[t]; }
    for (int v = 0; v < g.nv; ++v) {
      if (!alive[v] || deg[v] > 1) continue;
      if (keep_basepoint && v == g.basepoint) continue;
      alive[v] = 0;
      changed = true;
    }
  }
  CoreResult r{BGraph(g.alphabet, 0, -1), std::vector<int>(g.nv, -1)};
  int next = 0;
  for (int v = 0; v < g.nv; ++v)
    if (alive[v]) r.vmap[v] = next++;
  r.graph.nv = next;
  if (g.basepoint >= 0 && alive[g.basepoint]) r.graph.basepoint = r.vmap[g.basepoint];
  for (int l = 0; l < g.letters(); ++l)
    for (auto& [s, t] : g.edges[l])
      if (alive[s] && alive[t]) r.graph.edges[l].emplace_back(r.vmap[s], r.vmap[t]);
  return r;
}

// --- products ---------------------------------------------------------------

Product fiber_product(const BGraph& a, const BGraph& b) {
  if (!(a.alphabet == b.alphabet)) throw precondition_error("alphabet mismatch");
  Product p{BGraph(a.alphabet, a.nv * b.nv, -1), {}, {}};
  if (a.basepoint >= 0 && b.basepoint >= 0)
    p.graph.basepoint = a.basepoint * b.nv + b.basepoint;
  p.vpair.resize(p.graph.nv);
  for (int u = 0; u < a.nv; ++u)
    for (int v = 0; v < b.nv; ++v) p.vpair[u * b.nv + v] = {u, v};
  p.epair.resize(a.letters());
  for (int l = 0; l < a.letters(); ++l)
    for (size_t i = 0; i < a.edges[l].size(); ++i)
      for (size_t j = 0; j < b.edges[l].size(); ++j) {
        auto [sa, ta] = a.edges[l][i];
        auto [sb, tb] = b.edges[l][j];
        p.graph.edges[l].emplace_back(sa * b.nv + sb, ta * b.nv + tb);
        p.epair[l].emplace_back(static_cast<int>(i), static_cast<int>(j));
      }
  return p;
}

Product pullback(const BGraph& a, const BGraph& b) {
  Product fp = fiber_product(a, b);
  CoreResult c = core(fp.graph, /*keep_basepoint=*/false);
  Product out{std::move(c.graph), {}, {}};
  out.vpair.resize(out.graph.nv);
  for (int v = 0; v < fp.graph.nv; ++v)
    if (c.vmap[v] >= 0) out.vpair[c.vmap[v]] = fp.vpair[v];
  out.epair.resize(a.letters());
  for (int l = 0; l < a.letters(); ++l)
    for (size_t i = 0; i < fp.graph.edges[l].size(); ++i) {
      auto [s, t] = fp.graph.edges[l][i];
      if (c.vmap[s] >= 0 && c.vmap[t] >= 0) out.epair[l].push_back(fp.epair[l][i]);
    }
  // basepoint may have been cored away
  if (fp.graph.basepoint >= 0)
    out.graph.basepoint = c.vmap[fp.graph.basepoint];  // -1 if removed
  return out;
}

Rational shnc_ratio(const BGraph& a, const BGraph& b) {
  if (!a.connected() || a.rank() <= 1)
    throw precondition_error("shnc_ratio: first graph must be connected of rank > 1");
  Product p = pullback(a, b);
  long long minus_chi = -p.graph.chi();
  if (minus_chi == 0) throw precondition_error("shnc_ratio: degenerate pair, chi(pullback)=0");
  return Rational(Int(a.chi() * b.chi()), Int(minus_chi));
}

// --- morphisms --------------------------------------------------------------

bool validate_morphism(const BGraph& dom, const BGraph& cod, const GraphMorphism& m,
                       bool check_basepoint) {
  if (static_cast<int>(m.vmap.size()) != dom.nv) return false;
  if (static_cast<int>(m.emap.size()) != dom.letters()) return false;
  for (int v = 0; v < dom.nv; ++v)
    if (m.vmap[v] < 0 || m.vmap[v] >= cod.nv) return false;
  for (int l = 0; l < dom.letters(); ++l) {
    if (m.emap[l].size() != dom.edges[l].size()) return false;
    for (size_t e = 0; e < dom.edges[l].size(); ++e) {
      int ce = m.emap[l][e];
      if (ce < 0 || ce >= static_cast<int>(cod.edges[l].size())) return false;
      auto [s, t] = dom.edges[l][e];
      auto [cs, ct] = cod.edges[l][ce];
      if (m.vmap[s] != cs || m.vmap[t] != ct) return false;
    }
  }
  if (check_basepoint && dom.basepoint >= 0 && cod.basepoint >= 0 &&
      m.vmap[dom.basepoint] != cod.basepoint)
    return false;
  return true;
}

std::optional<GraphMorphism> morphism_from_seed(const BGraph& dom, const BGraph& cod,
                                                int from, int to) {
  GraphMorphism m;
  m.vmap.assign(dom.nv, -1);
  m.emap.resize(dom.letters());
  for (int l = 0; l < dom.letters(); ++l) m.emap[l].assign(dom.edges[l].size(), -1);
  m.vmap[from] = to;
  std::queue<int> q;
  q.push(from);
  auto assign = [&](int v, int img) {
    if (m.vmap[v] < 0) {
      m.vmap[v] = img;
      q.push(v);
      return true;
    }
    return m.vmap[v] == img;
  };
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int l = 0; l < dom.letters(); ++l) {
      for (size_t e = 0; e < dom.edges[l].size(); ++e) {
        auto [s, t] = dom.edges[l][e];
        if (s == v) {
          auto ce = cod.out_edge(m.vmap[v], l);
          if (!ce) return std::nullopt;
          m.emap[l][e] = *ce;
          if (!assign(t, cod.edges[l][*ce].second)) return std::nullopt;
        }
        if (t == v) {
          auto ce = cod.in_edge(m.vmap[v], l);
          if (!ce) return std::nullopt;
          m.emap[l][e] = *ce;
          if (!assign(s, cod.edges[l][*ce].first)) return std::nullopt;
        }
      }
    }
  }
  return m;
}

std::vector<GraphMorphism> enumerate_morphisms(const BGraph& dom, const BGraph& cod) {
  std::vector<GraphMorphism> total;
  if (dom.nv == 0) {
    GraphMorphism m;
    m.emap.resize(dom.letters());
    total.push_back(m);
    return total;
  }
  auto comp = dom.component_ids();
  int ncomp = dom.component_count();
  std::vector<int> rep(ncomp, -1);
  for (int v = dom.nv - 1; v >= 0; --v) rep[comp[v]] = v;
  // per-component partial morphisms
  std::vector<std::vector<GraphMorphism>> per(ncomp);
  for (int c = 0; c < ncomp; ++c)
    for (int t = 0; t < cod.nv; ++t)
      if (auto m = morphism_from_seed(dom, cod, rep[c], t)) per[c].push_back(std::move(*m));
  // combine: vertex/edge maps are disjointly supported across components
  GraphMorphism acc;
  acc.vmap.assign(dom.nv, -1);
  acc.emap.resize(dom.letters());
  for (int l = 0; l < dom.letters(); ++l) acc.emap[l].assign(dom.edges[l].size(), -1);
  std::vector<size_t> idx(ncomp, 0);
  // iterative cartesian product
  std::vector<GraphMorphism> out;
  for (auto& p : per)
    if (p.empty()) return out;
  while (true) {
    GraphMorphism m = acc;
    for (int c = 0; c < ncomp; ++c) {
      auto& pm = per[c][idx[c]];
      for (int v = 0; v < dom.nv; ++v)
        if (pm.vmap[v] >= 0) m.vmap[v] = pm.vmap[v];
      for (int l = 0; l < dom.letters(); ++l)
        for (size_t e = 0; e < pm.emap[l].size(); ++e)
          if (pm.emap[l][e] >= 0) m.emap[l][e] = pm.emap[l][e];
    }
    out.push_back(std::move(m));
    int c = ncomp - 1;
    while (c >= 0 && ++idx[c] == per[c].size()) idx[c--] = 0;
    if (c < 0) break;
  }
  return out;
}

GraphMorphism to_bouquet(const BGraph& g, const BGraph& omega) {
  GraphMorphism m;
  m.vmap.assign(g.nv, 0);
  m.emap.resize(g.letters());
  for (int l = 0; l < g.letters(); ++l) m.emap[l].assign(g.edges[l].size(), 0);
  if (omega.nv != 1) throw precondition_error("to_bouquet: codomain is not a bouquet");
  return m;
}

bool is_covering(const BGraph& dom, const BGraph& cod, const GraphMorphism& m, int degree) {
  if (!validate_morphism(dom, cod, m, false)) return false;
  std::vector<int> fiber(cod.nv, 0);
  for (int v = 0; v < dom.nv; ++v) ++fiber[m.vmap[v]];
  for (int v = 0; v < cod.nv; ++v)
    if (fiber[v] != degree) return false;
  // local bijectivity on stars: each vertex lifts each incident codomain edge
  for (int l = 0; l < cod.letters(); ++l) {
    std::vector<int> efiber(cod.edges[l].size(), 0);
    for (size_t e = 0; e < dom.edges[l].size(); ++e) ++efiber[m.emap[l][e]];
    for (size_t e = 0; e < cod.edges[l].size(); ++e)
      if (efiber[e] != degree) return false;
  }
  return true;
}

// --- quotients --------------------------------------------------------------

Quotient fold_partition(const BGraph& g, const std::vector<int>& part_in) {
  // Normalize block ids by first occurrence so empty blocks (e.g. from a
  // merge that removed an id) don't survive as phantom isolated vertices.
  std::vector<int> part = part_in;
  {
    std::map<int, int> renum0;
    int next0 = 0;
    for (auto& b : part) {
      auto it = renum0.find(b);
      if (it == renum0.end()) {
        renum0.emplace(b, next0);
        b = next0++;
      } else {
        b = it->second;
      }
    }
  }
  // Build the merged graph, fold it, and compose the maps.
  int nb = part.empty() ? 0 : 1 + *std::max_element(part.begin(), part.end());
  BGraph q(g.alphabet, nb, g.basepoint >= 0 ? part[g.basepoint] : -1);
  for (int l = 0; l < g.letters(); ++l) {
    std::set<std::pair<int, int>> seen;
    for (auto& [s, t] : g.edges[l]) {
      std::pair<int, int> e(part[s], part[t]);
      if (seen.insert(e).second) q.edges[l].push_back(e);
    }
  }
  std::vector<int> fmap = fold_graph(q);
  Quotient out;
  out.part.resize(g.nv);
  for (int v = 0; v < g.nv; ++v) out.part[v] = fmap[part[v]];
  // renumber blocks by first occurrence over original vertices
  std::vector<int> renum(q.nv, -1);
  int next = 0;
  for (int v = 0; v < g.nv; ++v) {
    int b = out.part[v];
    if (renum[b] < 0) renum[b] = next++;
    out.part[v] = renum[b];
  }
  BGraph q2(g.alphabet, q.nv, q.basepoint >= 0 ? renum[q.basepoint] : -1);
  for (int l = 0; l < g.letters(); ++l)
    for (auto& [s, t] : q.edges[l]) q2.edges[l].emplace_back(renum[s], renum[t]);
  out.graph = std::move(q2);
  return out;
}

std::vector<Quotient> quotients(const BGraph& g, int cap) {
  if (g.nv > cap) throw cap_error("quotients: |V| exceeds cap");
  std::vector<int> ident(g.nv);
  std::iota(ident.begin(), ident.end(), 0);
  Quotient q0 = fold_partition(g, ident);
  std::map<std::vector<int>, Quotient> visited;
  std::vector<std::vector<int>> stack;
  visited[q0.part] = q0;
  stack.push_back(q0.part);
  while (!stack.empty()) {
    std::vector<int> p = std::move(stack.back());
    stack.pop_back();
    int nb = 1 + *std::max_element(p.begin(), p.end());
    for (int i = 0; i < nb; ++i)
      for (int j = i + 1; j < nb; ++j) {
        std::vector<int> merged = p;
        for (auto& b : merged)
          if (b == j) b = i;
        // compress block ids
        Quotient q = fold_partition(g, merged);
        if (visited.find(q.part) == visited.end()) {
          stack.push_back(q.part);
          visited[q.part] = std::move(q);
        }
      }
  }
  std::vector<Quotient> out;
  out.reserve(visited.size());
  for (auto& [k, v] : visited) out.push_back(v);
  return out;
}

std::vector<Quotient> quotients_bruteforce(const BGraph& g, int cap) {
  if (g.nv > cap) throw cap_error("quotients_bruteforce: |V| exceeds cap");
  std::map<std::vector<int>, Quotient> visited;
  // restricted-growth strings
  std::vector<int> rgs(g.nv, 0);
  if (g.nv == 0) {
    Quotient q;
    q.graph = g;
    return {q};
  }
  while (true) {
    Quotient q = fold_partition(g, rgs);
    if (visited.find(q.part) == visited.end()) visited[q.part] = std::move(q);
    // next RGS
    int i = g.nv - 1;
    for (; i > 0; --i) {
      int mx = *std::max_element(rgs.begin(), rgs.begin() + i);
      if (rgs[i] <= mx) {
        ++rgs[i];
        std::fill(rgs.begin() + i + 1, rgs.end(), 0);
        break;
      }
      // else reset handled by fill after increment of an earlier position
    }
    if (i == 0) break;
  }
  std::vector<Quotient> out;
  for (auto& [k, v] : visited) out.push_back(v);
  return out;
}

// --- spanning trees and coverings -------------------------------------------

long long edge_id(const BGraph& g, int letter, int e) {
  long long id = e;
  for (int l = 0; l < letter; ++l) id += static_cast<long long>(g.edges[l].size());
  return id;
}

SpanningTree spanning_tree(const BGraph& g, int root) {
  SpanningTree st;
  st.root = root;
  st.parent.assign(g.nv, -1);
  st.letter.assign(g.nv, -1);
  st.sign.assign(g.nv, 0);
  st.in_tree_edge.assign(static_cast<size_t>(g.edge_count()), 0);
  st.path_from_root.assign(g.nv, Word{});
  std::vector<char> seen(g.nv, 0);
  seen[root] = 1;
  std::queue<int> q;
  q.push(root);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int l = 0; l < g.letters(); ++l)
      for (size_t e = 0; e < g.edges[l].size(); ++e) {
        auto [s, t] = g.edges[l][e];
        if (s == v && !seen[t]) {
          seen[t] = 1;
          st.parent[t] = v;
          st.letter[t] = l;
          st.sign[t] = +1;
          st.in_tree_edge[edge_id(g, l, static_cast<int>(e))] = 1;
          st.path_from_root[t] = st.path_from_root[v];
          st.path_from_root[t].syl.emplace_back(l, +1);
          q.push(t);
        }
        if (t == v && !seen[s]) {
          seen[s] = 1;
          st.parent[s] = v;
          st.letter[s] = l;
          st.sign[s] = -1;
          st.in_tree_edge[edge_id(g, l, static_cast<int>(e))] = 1;
          st.path_from_root[s] = st.path_from_root[v];
          st.path_from_root[s].syl.emplace_back(l, -1);
          q.push(s);
        }
      }
  }
  for (int l = 0; l < g.letters(); ++l)
    for (size_t e = 0; e < g.edges[l].size(); ++e) {
      auto [s, t] = g.edges[l][e];
      if (!seen[s] || !seen[t]) continue;  // other component
      if (!st.in_tree_edge[edge_id(g, l, static_cast<int>(e))])
        st.nontree.emplace_back(l, static_cast<int>(e));
    }
  return st;
}

std::vector<Word> free_basis(const BGraph& g, int base) {
  SpanningTree st = spanning_tree(g, base);
  std::vector<Word> out;
  for (auto& [l, e] : st.nontree) {
    auto [s, t] = g.edges[l][e];
    Word w = st.path_from_root[s];
    w.syl.emplace_back(l, +1);
    w = w * st.path_from_root[t].inverse();
    out.push_back(w);
  }
  return out;
}

Covering covering_from_rep(const BGraph& g, const std::vector<std::vector<int>>& perms) {
  if (!g.connected()) throw precondition_error("covering_from_rep: graph not connected");
  int base = g.basepoint >= 0 ? g.basepoint : 0;
  SpanningTree st = spanning_tree(g, base);
  if (perms.size() != st.nontree.size())
    throw precondition_error("covering_from_rep: wrong number of permutations");
  int d = perms.empty() ? 0 : static_cast<int>(perms[0].size());
  if (perms.empty()) throw precondition_error("covering_from_rep: need at least degree info");
  Covering c;
  c.degree = d;
  c.total = BGraph(g.alphabet, g.nv * d, base * d + 0);
  c.proj.vmap.resize(g.nv * d);
  for (int v = 0; v < g.nv; ++v)
    for (int i = 0; i < d; ++i) c.proj.vmap[v * d + i] = v;
  c.proj.emap.resize(g.letters());
  std::map<std::pair<int, int>, const std::vector<int>*> nontree_perm;
  for (size_t k = 0; k < st.nontree.size(); ++k) nontree_perm[st.nontree[k]] = &perms[k];
  for (int l = 0; l < g.letters(); ++l)
    for (size_t e = 0; e < g.edges[l].size(); ++e) {
      auto [s, t] = g.edges[l][e];
      auto it = nontree_perm.find({l, static_cast<int>(e)});
      for (int i = 0; i < d; ++i) {
        int j = it == nontree_perm.end() ? i : (*it->second)[i];
        c.total.edges[l].emplace_back(s * d + i, t * d + j);
        c.proj.emap[l].push_back(static_cast<int>(e));
      }
    }
  return c;
}

std::vector<std::vector<int>> monodromy(const BGraph& g, const Covering& c) {
  int base = g.basepoint >= 0 ? g.basepoint : 0;
  std::vector<Word> basis = free_basis(g, base);
  std::vector<std::vector<int>> out;
  for (auto& w : basis) {
    std::vector<int> p(c.degree);
    for (int i = 0; i < c.degree; ++i) {
      auto end = c.total.walk(base * c.degree + i, w);
      if (!end) throw invariant_violation("monodromy: lift failed");
      p[i] = *end % c.degree;
    }
    out.push_back(p);
  }
  return out;
}

std::vector<std::vector<int>> all_permutations(int d) {
  std::vector<int> p(d);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

std::vector<Covering> enumerate_coverings(const BGraph& g, int d, long long cap) {
  if (!g.connected()) throw precondition_error("enumerate_coverings: graph not connected");
  int base = g.basepoint >= 0 ? g.basepoint : 0;
  long long r = static_cast<long long>(free_basis(g, base).size());
  auto perms = all_permutations(d);
  long long count = 1;
  for (long long i = 0; i < r; ++i) {
    count *= static_cast<long long>(perms.size());
    if (count > cap) throw cap_error("enumerate_coverings: (d!)^rank exceeds cap");
  }
  std::vector<Covering> out;
  std::vector<size_t> idx(r, 0);
  if (r == 0) {
    // rank 0: the single covering is d disjoint copies
    Covering cc;
    cc.degree = d;
    cc.total = BGraph(g.alphabet, g.nv * d, base * d);
    cc.proj.vmap.resize(g.nv * d);
    for (int v = 0; v < g.nv; ++v)
      for (int i = 0; i < d; ++i) cc.proj.vmap[v * d + i] = v;
    cc.proj.emap.resize(g.letters());
    for (int l = 0; l < g.letters(); ++l)
      for (size_t e = 0; e < g.edges[l].size(); ++e) {
        auto [s, t] = g.edges[l][e];
        for (int i = 0; i < d; ++i) {
          cc.total.edges[l].emplace_back(s * d + i, t * d + i);
          cc.proj.emap[l].push_back(static_cast<int>(e));
        }
      }
    out.push_back(cc);
    return out;
  }
  while (true) {
    std::vector<std::vector<int>> rep;
    for (long long i = 0; i < r; ++i) rep.push_back(perms[idx[i]]);
    out.push_back(covering_from_rep(g, rep));
    long long i = r - 1;
    while (i >= 0 && ++idx[i] == perms.size()) idx[i--] = 0;
    if (i < 0) break;
  }
  return out;
}

std::vector<std::vector<std::vector<int>>> monodromy_reps_up_to_conjugacy(const BGraph& g,
                                                                          int d) {
  int base = g.basepoint >= 0 ? g.basepoint : 0;
  long long r = static_cast<long long>(free_basis(g, base).size());
  auto perms = all_permutations(d);
  auto conj = [&](const std::vector<int>& p, const std::vector<int>& tau) {
    // tau^-1 p tau
    std::vector<int> inv(d);
    for (int i = 0; i < d; ++i) inv[tau[i]] = i;
    std::vector<int> out(d);
    for (int i = 0; i < d; ++i) out[i] = inv[p[tau[i]]];
    return out;
  };
  std::set<std::vector<std::vector<int>>> seen;
  std::vector<std::vector<std::vector<int>>> out;
  std::vector<size_t> idx(r, 0);
  if (r == 0) return {{}};
  while (true) {
    std::vector<std::vector<int>> rep;
    for (long long i = 0; i < r; ++i) rep.push_back(perms[idx[i]]);
    // canonical form under simultaneous conjugation
    std::vector<std::vector<int>> best = rep;
    for (auto& tau : perms) {
      std::vector<std::vector<int>> cand;
      for (auto& p : rep) cand.push_back(conj(p, tau));
      if (cand < best) best = cand;
    }
    if (seen.insert(best).second) out.push_back(rep);
    long long i = r - 1;
    while (i >= 0 && ++idx[i] == perms.size()) idx[i--] = 0;
    if (i < 0) break;
  }
  return out;
}

// --- coverings inside pullbacks ---------------------------------------------

std::vector<SubCovering> find_coverings_in_pullback(const BGraph& g, const BGraph& delta,
                                                    int d, bool dedup_conjugacy,
                                                    long long cap) {
  if (!g.connected()) throw precondition_error("find_coverings_in_pullback: g not connected");
  std::vector<SubCovering> out;
  std::vector<std::vector<std::vector<int>>> reps;
  if (dedup_conjugacy) {
    reps = monodromy_reps_up_to_conjugacy(g, d);
  } else {
    for (auto& c : enumerate_coverings(g, d, cap)) reps.push_back(monodromy(g, c));
  }
  long long work = 0;
  for (auto& rep : reps) {
    Covering cov = rep.empty() && free_basis(g, g.basepoint >= 0 ? g.basepoint : 0).empty()
                       ? enumerate_coverings(g, d, cap)[0]
                       : covering_from_rep(g, rep);
    for (auto& q : enumerate_morphisms(cov.total, delta)) {
      if (++work > cap) throw cap_error("find_coverings_in_pullback: cap exceeded");
      // joint injectivity of (projection, q) on vertices and edges
      std::set<std::pair<int, int>> vseen;
      bool ok = true;
      for (int v = 0; v < cov.total.nv && ok; ++v)
        ok = vseen.insert({cov.proj.vmap[v], q.vmap[v]}).second;
      for (int l = 0; l < g.letters() && ok; ++l) {
        std::set<std::pair<int, int>> eseen;
        for (size_t e = 0; e < cov.total.edges[l].size() && ok; ++e)
          ok = eseen.insert({cov.proj.emap[l][e], q.emap[l][e]}).second;
      }
      if (!ok) continue;
      SubCovering sc;
      sc.monodromy = rep;
      sc.into_delta = q;
      for (int l = 0; l < delta.letters(); ++l)
        for (size_t e = 0; e < delta.edges[l].size(); ++e) {
          int mult = 0;
          for (size_t e2 = 0; e2 < cov.total.edges[l].size(); ++e2)
            if (q.emap[l][e2] == static_cast<int>(e)) ++mult;
          sc.delta_edge_multiplicity.push_back(mult);
        }
      out.push_back(std::move(sc));
    }
  }
  return out;
}

}  // namespace stlab
