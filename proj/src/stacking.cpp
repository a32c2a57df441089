#include "stlab/stacking.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <queue>
#include <random>
#include <set>

#include "stlab/errors.hpp"

namespace stlab {

bool Stacking::valid() const {
  if (static_cast<int>(heights.size()) != graph.nv) return false;
  if (!graph.folded()) return false;
  std::set<long long> hs(heights.begin(), heights.end());
  if (static_cast<int>(hs.size()) != graph.nv) return false;
  for (int l = 0; l < graph.letters(); ++l) {
    std::vector<int> order = edge_order(l);
    for (size_t i = 1; i < order.size(); ++i)
      if (heights[graph.edges[l][order[i - 1]].second] >=
          heights[graph.edges[l][order[i]].second])
        return false;
  }
  return true;
}

std::vector<int> Stacking::edge_order(int letter) const {
  std::vector<int> order(graph.edges[letter].size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return heights[graph.edges[letter][a].first] < heights[graph.edges[letter][b].first];
  });
  return order;
}

long long Stacking::length() const {
  long long len = 0;
  for (auto& es : graph.edges)
    for (auto& [s, t] : es) len += std::abs(heights[s] - heights[t]);
  return len;
}

int Stacking::min_vertex() const {
  return static_cast<int>(std::min_element(heights.begin(), heights.end()) -
                          heights.begin());
}

int Stacking::max_vertex() const {
  return static_cast<int>(std::max_element(heights.begin(), heights.end()) -
                          heights.begin());
}

namespace {

// Backtracking over placements: place[pos] = vertex receiving height pos,
// positions ascending, candidate vertices in increasing id order. Pairwise
// per-letter consistency is checked on placed endpoints, so the search is
// complete and deterministic.
struct StackSearch {
  const BGraph& g;
  std::vector<int> pos_of;  // vertex -> height position, -1 if unplaced
  long long nodes = 0, node_cap = -1;

  explicit StackSearch(const BGraph& gr) : g(gr), pos_of(gr.nv, -1) {}

  bool consistent() const {
    for (int l = 0; l < g.letters(); ++l) {
      auto& es = g.edges[l];
      for (size_t i = 0; i < es.size(); ++i)
        for (size_t j = i + 1; j < es.size(); ++j) {
          int si = pos_of[es[i].first], sj = pos_of[es[j].first];
          int ti = pos_of[es[i].second], tj = pos_of[es[j].second];
          if (si < 0 || sj < 0 || ti < 0 || tj < 0) continue;
          if ((si < sj) != (ti < tj)) return false;
        }
    }
    return true;
  }

  bool dfs(int pos, std::vector<int>& place) {
    if (pos == g.nv) return true;
    for (int v = 0; v < g.nv; ++v) {
      if (pos_of[v] >= 0) continue;
      if (node_cap >= 0 && ++nodes > node_cap)
        throw cap_error("find_stacking: search budget exceeded");
      pos_of[v] = pos;
      place[pos] = v;
      if (consistent() && dfs(pos + 1, place)) return true;
      pos_of[v] = -1;
    }
    return false;
  }
};

}  // namespace

std::optional<Stacking> find_stacking(const BGraph& g, int cap) {
  if (!g.folded()) throw precondition_error("find_stacking: graph not folded");
  if (g.nv == 0) return std::nullopt;
  StackSearch search(g);
  if (g.nv > cap) search.node_cap = 20'000'000;
  std::vector<int> place(g.nv, -1);
  if (!search.dfs(0, place)) return std::nullopt;
  Stacking s;
  s.graph = g;
  s.heights.resize(g.nv);
  for (int v = 0; v < g.nv; ++v) s.heights[v] = search.pos_of[v];
  return s;
}

MinimalStacking minimal_stacking(const BGraph& g, int exhaustive_cap, std::uint64_t seed) {
  auto first = find_stacking(g, std::max(exhaustive_cap, 10));
  if (!first) throw precondition_error("minimal_stacking: graph is not stackable");
  MinimalStacking best;
  best.stacking = *first;
  if (g.nv <= exhaustive_cap) {
    std::vector<long long> perm(g.nv);
    std::iota(perm.begin(), perm.end(), 0);
    bool found = false;
    long long best_len = 0;
    std::vector<long long> best_h;
    Stacking s;
    s.graph = g;
    do {
      s.heights = perm;
      if (!s.valid()) continue;
      long long len = s.length();
      if (!found || len < best_len || (len == best_len && perm < best_h)) {
        found = true;
        best_len = len;
        best_h = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    s.heights = best_h;
    best.stacking = s;
    best.certified = true;
    return best;
  }
  // annealing upper bound: adjacent swaps in the height order
  best.certified = false;
  std::mt19937_64 rng(seed);
  Stacking cur = best.stacking;
  long long cur_len = cur.length(), best_len = cur_len;
  double temp = static_cast<double>(g.nv);
  std::uniform_int_distribution<int> pick(0, g.nv - 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int iter = 0; iter < 20000; ++iter, temp *= 0.9995) {
    int a = pick(rng), b = pick(rng);
    if (a == b) continue;
    std::swap(cur.heights[a], cur.heights[b]);
    long long len = cur.valid() ? cur.length() : -1;
    bool accept = len >= 0 && (len <= cur_len ||
                               unif(rng) < std::exp((cur_len - len) / std::max(temp, 1e-9)));
    if (accept) {
      cur_len = len;
      if (len < best_len) {
        best_len = len;
        best.stacking = cur;
      }
    } else {
      std::swap(cur.heights[a], cur.heights[b]);
    }
  }
  return best;
}

bool is_bridge(const BGraph& g, int letter, int e) {
  auto [s, t] = g.edges[letter][e];
  if (s == t) return false;
  // are s and t connected avoiding this edge?
  std::vector<char> seen(g.nv, 0);
  std::queue<int> q;
  seen[s] = 1;
  q.push(s);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int l = 0; l < g.letters(); ++l)
      for (size_t i = 0; i < g.edges[l].size(); ++i) {
        if (l == letter && static_cast<int>(i) == e) continue;
        auto [a, b] = g.edges[l][i];
        if (a == v && !seen[b]) { seen[b] = 1; q.push(b); }
        if (b == v && !seen[a]) { seen[a] = 1; q.push(a); }
      }
  }
  return !seen[t];
}

namespace {

// Spanning tree flags avoiding one edge; requires the graph to stay connected.
std::optional<std::vector<char>> spanning_tree_avoiding(const BGraph& g, int letter, int e) {
  std::vector<int> parent(g.nv);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  std::vector<char> tree(static_cast<size_t>(g.edge_count()), 0);
  int joined = 0;
  for (int l = 0; l < g.letters(); ++l)
    for (size_t i = 0; i < g.edges[l].size(); ++i) {
      if (l == letter && static_cast<int>(i) == e) continue;
      auto [a, b] = g.edges[l][i];
      if (find(a) != find(b)) {
        parent[find(a)] = find(b);
        tree[edge_id(g, l, static_cast<int>(i))] = 1;
        ++joined;
      }
    }
  if (joined != g.nv - 1) return std::nullopt;
  return tree;
}

std::vector<std::pair<int, int>> incident_edges(const BGraph& g, int v) {
  std::vector<std::pair<int, int>> out;
  for (int l = 0; l < g.letters(); ++l)
    for (size_t e = 0; e < g.edges[l].size(); ++e)
      if (g.edges[l][e].first == v || g.edges[l][e].second == v)
        out.emplace_back(l, static_cast<int>(e));
  return out;
}

std::optional<VisibleEdge> visible_at_min(const BGraph& g, const Stacking& s) {
  int vmin = s.min_vertex();
  for (auto& [l, e] : incident_edges(g, vmin)) {
    if (is_bridge(g, l, e)) continue;
    auto tree = spanning_tree_avoiding(g, l, e);
    if (!tree) continue;
    VisibleEdge out;
    out.stacking = s;
    out.letter = l;
    out.edge = e;
    out.tree_edge = *tree;
    return out;
  }
  return std::nullopt;
}

}  // namespace

std::optional<VisibleEdge> sigma_min_nonbridge(const BGraph& g, const Stacking& s) {
  if (!g.connected()) throw precondition_error("sigma_min_nonbridge: graph not connected");
  if (g.chi() > 0) throw precondition_error("sigma_min_nonbridge: chi must be <= 0");
  if (!s.valid()) throw precondition_error("sigma_min_nonbridge: invalid stacking");

  if (auto v = visible_at_min(g, s)) return v;

  // All edges at the minimal vertex are bridges. Move to the closest vertex
  // u* incident to a non-bridge, hanging-tree component of v* reversed and
  // placed just above u*.
  int vstar = s.min_vertex();
  std::vector<int> dist(g.nv, -1), parent(g.nv, -1);
  std::queue<int> q;
  dist[vstar] = 0;
  q.push(vstar);
  int ustar = -1;
  while (!q.empty() && ustar < 0) {
    int v = q.front();
    q.pop();
    bool on_cycle = false;
    for (auto& [l, e] : incident_edges(g, v))
      if (!is_bridge(g, l, e)) on_cycle = true;
    if (on_cycle) {
      ustar = v;
      break;
    }
    for (auto& [l, e] : incident_edges(g, v)) {
      auto [a, b] = g.edges[l][e];
      int other = (a == v) ? b : a;
      if (dist[other] < 0) {
        dist[other] = dist[v] + 1;
        q.push(other);
      }
    }
  }
  if (ustar >= 0) {
    // component of v* in g minus u*
    std::vector<char> c1(g.nv, 0);
    c1[vstar] = 1;
    std::queue<int> bq;
    bq.push(vstar);
    while (!bq.empty()) {
      int v = bq.front();
      bq.pop();
      for (auto& [l, e] : incident_edges(g, v)) {
        auto [a, b] = g.edges[l][e];
        int other = (a == v) ? b : a;
        if (other != ustar && !c1[other]) {
          c1[other] = 1;
          bq.push(other);
        }
      }
    }
    // new order: u* first, then C1 reversed by old height, then the rest in
    // old height order
    std::vector<int> verts(g.nv);
    std::iota(verts.begin(), verts.end(), 0);
    std::sort(verts.begin(), verts.end(), [&](int a, int b) {
      auto key = [&](int v) {
        int cls = (v == ustar) ? 0 : (c1[v] ? 1 : 2);
        long long h = (cls == 1) ? -s.heights[v] : s.heights[v];
        return std::pair<int, long long>(cls, h);
      };
      return key(a) < key(b);
    });
    Stacking s2;
    s2.graph = g;
    s2.heights.assign(g.nv, 0);
    for (int i = 0; i < g.nv; ++i) s2.heights[verts[i]] = i;
    if (s2.valid()) {
      if (auto v = visible_at_min(g, s2)) return v;
    }
  }
  // fallback: exhaustive over all stackings (small graphs)
  if (g.nv <= 8) {
    std::vector<long long> perm(g.nv);
    std::iota(perm.begin(), perm.end(), 0);
    Stacking cand;
    cand.graph = g;
    do {
      cand.heights = perm;
      if (!cand.valid()) continue;
      if (auto v = visible_at_min(g, cand)) return v;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return std::nullopt;
}

std::optional<StackableSubgroup> find_stackable_subgroup(const BGraph& g, int attempts,
                                                         std::uint64_t seed) {
  if (!g.connected() || g.rank() <= 1)
    throw precondition_error("find_stackable_subgroup: rank must exceed 1");
  int base = g.basepoint >= 0 ? g.basepoint : 0;
  std::vector<Word> basis = free_basis(g, base);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> bpick(0, static_cast<int>(basis.size()) - 1);
  std::uniform_int_distribution<int> expo(1, 3);
  std::uniform_int_distribution<int> nwords(2, 3);
  for (int a = 0; a < attempts; ++a) {
    int bi = bpick(rng), bj = bpick(rng);
    if (bi == bj) continue;
    Word u = basis[bi], v = basis[bj];
    std::vector<Word> gens;
    std::set<std::pair<int, int>> used;
    int k = nwords(rng);
    for (int i = 0; i < k; ++i) {
      int n = expo(rng), m = expo(rng);
      if (!used.insert({n, m}).second) continue;
      gens.push_back(commutator(v.pow(n), u.pow(m)));
    }
    if (gens.size() < 2) continue;
    BGraph sigma = fold_words(gens, g.alphabet);
    if (!sigma.connected() || sigma.chi() >= 0) continue;
    if (sigma.nv > 10) continue;
    auto nu = morphism_from_seed(sigma, g, sigma.basepoint, base);
    if (!nu) continue;
    auto st = find_stacking(sigma);
    if (!st) continue;
    StackableSubgroup out;
    out.sigma = sigma;
    out.nu = *nu;
    out.stacking = *st;
    return out;
  }
  return std::nullopt;
}

}  // namespace stlab
