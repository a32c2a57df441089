#include "stlab/wordmeasure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "stlab/errors.hpp"

namespace stlab {

namespace {

struct DSU {
  std::vector<int> p;
  explicit DSU(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

}  // namespace

FallingFactorialRational lift_count(const BGraph& dom, const BGraph& cod,
                                    const GraphMorphism& eta) {
  if (!validate_morphism(dom, cod, eta, false))
    throw precondition_error("not a morphism");
  std::vector<int> vfiber(cod.nv, 0);
  for (int v = 0; v < dom.nv; ++v) ++vfiber[eta.vmap[v]];
  std::vector<std::vector<int>> efiber(cod.letters());
  for (int l = 0; l < cod.letters(); ++l) {
    efiber[l].assign(cod.edges[l].size(), 0);
    for (size_t e = 0; e < dom.edges[l].size(); ++e) ++efiber[l][eta.emap[l][e]];
  }
  std::vector<int> num, den;
  for (int v = 0; v < cod.nv; ++v) {
    if (vfiber[v] == 0) throw precondition_error("morphism not surjective on vertices");
    num.push_back(vfiber[v]);
  }
  for (int l = 0; l < cod.letters(); ++l)
    for (size_t e = 0; e < cod.edges[l].size(); ++e) {
      if (efiber[l][e] == 0) throw precondition_error("morphism not surjective on edges");
      den.push_back(efiber[l][e]);
    }
  return FallingFactorialRational::term(Rational(1), num, den);
}

std::vector<Decomposition> decomp2(const BGraph& dom, int cap) {
  BGraph omega = bouquet(dom.alphabet);
  std::vector<Decomposition> out;
  for (Quotient& q : quotients(dom, cap)) {
    Decomposition d;
    d.second = to_bouquet(q.graph, omega);
    d.first = std::move(q);
    out.push_back(std::move(d));
  }
  return out;
}

namespace {

// Splits a connected basepointed graph into its maximal wedge parts joined
// only at the basepoint and using pairwise disjoint letter sets. The measure
// is multiplicative over such parts because they share no permutations.
std::vector<BGraph> wedge_parts(const BGraph& g) {
  int bp = g.basepoint;
  std::vector<std::pair<int, int>> eid;  // flat edge index -> (letter, e)
  std::vector<std::vector<int>> flat(g.letters());
  for (int l = 0; l < g.letters(); ++l)
    for (size_t e = 0; e < g.edges[l].size(); ++e) {
      flat[l].push_back(static_cast<int>(eid.size()));
      eid.emplace_back(l, static_cast<int>(e));
    }
  if (eid.empty()) return {g};
  DSU dsu(static_cast<int>(eid.size()));
  std::vector<int> vertex_anchor(g.nv, -1), letter_anchor(g.letters(), -1);
  for (size_t i = 0; i < eid.size(); ++i) {
    auto [l, e] = eid[i];
    auto [s, t] = g.edges[l][e];
    for (int v : {s, t})
      if (v != bp) {
        if (vertex_anchor[v] < 0) vertex_anchor[v] = static_cast<int>(i);
        dsu.unite(static_cast<int>(i), vertex_anchor[v]);
      }
    if (letter_anchor[l] < 0) letter_anchor[l] = static_cast<int>(i);
    dsu.unite(static_cast<int>(i), letter_anchor[l]);
  }
  std::vector<int> roots;
  for (size_t i = 0; i < eid.size(); ++i)
    if (dsu.find(static_cast<int>(i)) == static_cast<int>(i)) roots.push_back(static_cast<int>(i));
  if (roots.size() <= 1) return {g};
  std::vector<BGraph> parts;
  for (int r : roots) {
    std::vector<int> vmap(g.nv, -1);
    BGraph part(g.alphabet, 0, -1);
    auto local = [&](int v) {
      if (vmap[v] < 0) {
        vmap[v] = part.nv++;
      }
      return vmap[v];
    };
    local(bp);
    part.basepoint = vmap[bp];
    for (size_t i = 0; i < eid.size(); ++i) {
      if (dsu.find(static_cast<int>(i)) != r) continue;
      auto [l, e] = eid[i];
      auto [s, t] = g.edges[l][e];
      part.add_edge(l, local(s), local(t));
    }
    parts.push_back(std::move(part));
  }
  return parts;
}

// d disjoint copies of g, laid out like covering_from_rep (vertex v*d+sheet).
Covering disjoint_copies(const BGraph& g, int d) {
  Covering c;
  c.degree = d;
  int base = g.basepoint >= 0 ? g.basepoint : 0;
  c.total = BGraph(g.alphabet, g.nv * d, base * d + 0);
  c.proj.vmap.resize(g.nv * d);
  for (int v = 0; v < g.nv; ++v)
    for (int i = 0; i < d; ++i) c.proj.vmap[v * d + i] = v;
  c.proj.emap.resize(g.letters());
  for (int l = 0; l < g.letters(); ++l)
    for (size_t e = 0; e < g.edges[l].size(); ++e) {
      auto [s, t] = g.edges[l][e];
      for (int i = 0; i < d; ++i) {
        c.total.edges[l].emplace_back(s * d + i, t * d + i);
        c.proj.emap[l].push_back(static_cast<int>(e));
      }
    }
  return c;
}

// The expectation for one wedge part: (1/|G|) sum over homomorphisms of the
// part's group into the subgroup, and over fold-closed quotients of the
// resulting covering whose projection stays injective on the basepoint fiber,
// of one falling-factorial quotient per quotient graph.
FallingFactorialRational part_measure(const BGraph& g, int d, const FiniteAction& group,
                                      const MeasureCaps& caps) {
  std::vector<Word> basis = free_basis(g, g.basepoint);
  int r = static_cast<int>(basis.size());
  if (r > caps.max_rank) throw cap_error("rank cap exceeded");
  if (static_cast<long long>(g.nv) * d > caps.max_vertices)
    throw cap_error("covering vertex cap exceeded");
  long long homs = 1;
  for (int i = 0; i < r; ++i) {
    homs *= group.size();
    if (homs > caps.hom_budget) throw cap_error("homomorphism budget exceeded");
  }
  FallingFactorialRational sum;
  std::vector<int> idx(r, 0);
  while (true) {
    std::vector<std::vector<int>> perms;
    perms.reserve(r);
    for (int i = 0; i < r; ++i) perms.push_back(group.elements[idx[i]]);
    Covering cov = r == 0 ? disjoint_copies(g, d) : covering_from_rep(g, perms);
    for (const Quotient& q : quotients(cov.total, caps.max_vertices)) {
      bool efficient = true;
      for (int i = 0; i < d && efficient; ++i)
        for (int j = i + 1; j < d; ++j)
          if (q.part[g.basepoint * d + i] == q.part[g.basepoint * d + j]) {
            efficient = false;
            break;
          }
      if (!efficient) continue;
      std::vector<int> den;
      for (int l = 0; l < q.graph.letters(); ++l)
        if (!q.graph.edges[l].empty())
          den.push_back(static_cast<int>(q.graph.edges[l].size()));
      sum += FallingFactorialRational::term(Rational(1), {q.graph.nv}, den);
    }
    int i = 0;
    while (i < r && ++idx[i] == group.size()) idx[i++] = 0;
    if (i == r) break;
  }
  return (Rational(1) / Rational(group.size())) * sum;
}

}  // namespace

FallingFactorialRational expected_fixed_subsets_symbolic(const BGraph& g, int d,
                                                         const FiniteAction& group,
                                                         const MeasureCaps& caps) {
  if (g.basepoint < 0) throw precondition_error("basepoint required");
  if (!g.connected()) throw precondition_error("graph must be connected");
  if (!g.folded()) throw precondition_error("graph must be folded");
  if (d < 1 || group.points != d) throw precondition_error("group must act on d points");
  if (d > caps.max_d) throw cap_error("d cap exceeded");
  std::vector<BGraph> parts = wedge_parts(g);
  FallingFactorialRational result = FallingFactorialRational::constant(Rational(1));
  for (const BGraph& part : parts) result = result * part_measure(part, d, group, caps);
  // parts touch pairwise disjoint letters, so for an injective tuple the
  // per-part invariance events are independent and equidistributed:
  // E = prod(E_i) * (|G| / (n)_d)^{s-1}
  int s = static_cast<int>(parts.size());
  if (s > 1) {
    Rational scale = pow_int(Int(group.size()), static_cast<unsigned long>(s - 1));
    result = result * FallingFactorialRational::term(scale, {}, std::vector<int>(s - 1, d));
  }
  return result;
}

McEstimate monte_carlo_check(const BGraph& g, int d, const FiniteAction& group, int n,
                             long long samples, unsigned long long seed) {
  if (g.basepoint < 0 || !g.connected()) throw precondition_error("connected basepointed graph required");
  if (group.points != d || n < d) throw precondition_error("need a subgroup of S_d and n >= d");
  std::vector<Word> basis = free_basis(g, g.basepoint);
  // all injective d-tuples over [n]
  std::vector<std::vector<int>> tuples;
  std::vector<int> cur;
  std::vector<char> used(n, 0);
  auto rec = [&](auto&& self, int depth) -> void {
    if (depth == d) {
      tuples.push_back(cur);
      return;
    }
    for (int x = 0; x < n; ++x) {
      if (used[x]) continue;
      used[x] = 1;
      cur.push_back(x);
      self(self, depth + 1);
      cur.pop_back();
      used[x] = 0;
    }
  };
  rec(rec, 0);

  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> alpha(g.letters()), alpha_inv(g.letters());
  double sum = 0.0, sumsq = 0.0;
  for (long long s = 0; s < samples; ++s) {
    for (int l = 0; l < g.letters(); ++l) {
      alpha[l].resize(n);
      std::iota(alpha[l].begin(), alpha[l].end(), 0);
      std::shuffle(alpha[l].begin(), alpha[l].end(), rng);
      alpha_inv[l].resize(n);
      for (int x = 0; x < n; ++x) alpha_inv[l][alpha[l][x]] = x;
    }
    std::vector<std::vector<int>> word_perm;
    for (const Word& w : basis) {
      std::vector<int> p(n);
      std::iota(p.begin(), p.end(), 0);
      for (auto it = w.syl.rbegin(); it != w.syl.rend(); ++it) {
        const std::vector<int>& a = it->second > 0 ? alpha[it->first] : alpha_inv[it->first];
        for (int x = 0; x < n; ++x) p[x] = a[p[x]];
      }
      word_perm.push_back(std::move(p));
    }
    long long good = 0;
    std::vector<int> img(d);
    for (const auto& t : tuples) {
      bool ok = true;
      for (const auto& p : word_perm) {
        for (int j = 0; j < d; ++j) img[j] = p[t[j]];
        bool in_orbit = false;
        for (const auto& gp : group.elements) {
          bool eq = true;
          for (int j = 0; j < d; ++j)
            if (img[j] != t[gp[j]]) {
              eq = false;
              break;
            }
          if (eq) {
            in_orbit = true;
            break;
          }
        }
        if (!in_orbit) {
          ok = false;
          break;
        }
      }
      if (ok) ++good;
    }
    double v = static_cast<double>(good) / group.size();
    sum += v;
    sumsq += v * v;
  }
  McEstimate est;
  est.samples = samples;
  est.mean = sum / samples;
  double var = sumsq / samples - est.mean * est.mean;
  if (var < 0) var = 0;
  est.std_error = std::sqrt(var / samples);
  return est;
}

}  // namespace stlab
