#include "stlab/polymatroid.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "stlab/errors.hpp"

namespace stlab {

Polymatroid::Polymatroid(int ground, Semantics s) : n(ground), sem(s) {
  if (ground < 0 || ground > 20) throw cap_error("polymatroid ground set exceeds cap 20");
  table.assign(size_t(1) << n, unit());
}

Rational Polymatroid::unit() const {
  return sem == Semantics::additive ? Rational(0) : Rational(1);
}

Rational Polymatroid::comb(const Rational& a, const Rational& b) const {
  if (sem == Semantics::additive) return a + b;
  return a * b;
}

Rational Polymatroid::split(const Rational& a, const Rational& b) const {
  if (sem == Semantics::additive) return a - b;
  if (b == 0) throw precondition_error("multiplicative table with zero value");
  return a / b;
}

Polymatroid tabulate(int ground, Semantics sem,
                     const std::function<Rational(Subset)>& h) {
  Polymatroid p(ground, sem);
  for (Subset u = 0; u <= p.full(); ++u) p.at(u) = h(u);
  return p;
}

Polymatroid cardinality_polymatroid(int ground) {
  return tabulate(ground, Semantics::additive,
                  [](Subset u) { return Rational(__builtin_popcount(u)); });
}

Subset apply_map(const std::vector<int>& phi, Subset u) {
  Subset out = 0;
  for (size_t i = 0; i < phi.size(); ++i)
    if (u & (Subset(1) << i)) out |= Subset(1) << phi[i];
  return out;
}

PolymatroidReport check_polymatroid(const Polymatroid& p) {
  PolymatroidReport r;
  if (p.table[0] != p.unit()) {
    r.ok = false;
    r.message = "value at empty set is not the unit";
    return r;
  }
  Subset full = p.full();
  for (Subset u = 0; u <= full; ++u) {
    for (int a = 0; a < p.n; ++a) {
      if (u & (Subset(1) << a)) continue;
      Subset ua = u | (Subset(1) << a);
      if (p(ua) < p(u)) {
        r.ok = false;
        r.message = "monotonicity fails at element " + std::to_string(a) + " over subset " +
                    std::to_string(u);
        return r;
      }
      for (int b = a + 1; b < p.n; ++b) {
        if (u & (Subset(1) << b)) continue;
        Subset ub = u | (Subset(1) << b);
        if (p.comb(p(ua), p(ub)) < p.comb(p(ua | ub), p(u))) {
          r.ok = false;
          r.message = "submodularity fails at elements " + std::to_string(a) + "," +
                      std::to_string(b) + " over subset " + std::to_string(u);
          return r;
        }
      }
    }
    if (u == full) break;
  }
  return r;
}

bool is_morphism(const Polymatroid& p1, const Polymatroid& p2,
                 const std::vector<int>& phi) {
  if (p1.sem != p2.sem) throw precondition_error("morphism across mixed semantics");
  if (static_cast<int>(phi.size()) != p1.n) throw precondition_error("bad morphism map size");
  for (int v : phi)
    if (v < 0 || v >= p2.n) throw precondition_error("morphism map out of range");
  Subset full = p1.full();
  for (Subset u = 0; u <= full; ++u) {
    for (int v = 0; v < p1.n; ++v) {
      if (u & (Subset(1) << v)) continue;
      Subset uv = u | (Subset(1) << v);
      // h1(uv) - h1(u) >= h2(phi uv) - h2(phi u), cross-combined
      if (p1.comb(p1(uv), p2(apply_map(phi, u))) <
          p1.comb(p1(u), p2(apply_map(phi, uv))))
        return false;
    }
    if (u == full) break;
  }
  return true;
}

bool is_lossless(const Polymatroid& p1, const Polymatroid& p2,
                 const std::vector<int>& phi) {
  Subset full = p1.full();
  for (Subset u = 0; u <= full; ++u) {
    if (p2(apply_map(phi, u)) != p1(u)) return false;
    if (u == full) break;
  }
  return true;
}

Polymatroid contraction(const Polymatroid& p, Subset t) {
  Polymatroid out(p.n, p.sem);
  for (Subset u = 0; u <= p.full(); ++u) {
    out.at(u) = p.split(p(u | t), p(t));
    if (u == p.full()) break;
  }
  return out;
}

bool is_compact(const Polymatroid& p) {
  Subset full = p.full();
  for (int v = 0; v < p.n; ++v)
    if (p(full & ~(Subset(1) << v)) != p(full)) return false;
  return true;
}

std::vector<Rational> marginal_gains(const Polymatroid& p, const std::vector<int>& order) {
  if (static_cast<int>(order.size()) != p.n) throw precondition_error("bad ordering size");
  std::vector<char> seen(p.n, 0);
  for (int v : order) {
    if (v < 0 || v >= p.n || seen[v]) throw precondition_error("ordering is not a bijection");
    seen[v] = 1;
  }
  std::vector<Rational> delta(p.n);
  Subset prefix = 0;
  for (int v : order) {
    Subset next = prefix | (Subset(1) << v);
    delta[v] = p.split(p(next), p(prefix));
    prefix = next;
  }
  return delta;
}

namespace {

Rational rational_pow(const Rational& x, unsigned long k) {
  return Rational(pow_int(boost::multiprecision::numerator(x), k),
                  pow_int(boost::multiprecision::denominator(x), k));
}

}  // namespace

Rational shearer_check(const Polymatroid& p,
                       const std::vector<std::pair<Subset, Rational>>& lambda) {
  for (auto& [u, c] : lambda) {
    if (c < 0) throw precondition_error("shearer: negative coefficient");
    if (u > p.full()) throw precondition_error("shearer: subset out of range");
  }
  for (int v = 0; v < p.n; ++v) {
    Rational cover = 0;
    for (auto& [u, c] : lambda)
      if (u & (Subset(1) << v)) cover += c;
    if (cover < 1) throw precondition_error("shearer: lambda is not a fractional supercover");
  }
  Rational slack;
  if (p.sem == Semantics::additive) {
    Rational lhs = 0;
    for (auto& [u, c] : lambda) lhs += c * p(u);
    slack = lhs - p(p.full());
  } else {
    // Common denominator D: compare prod v(U)^num with v(full)^D exactly.
    Int d = 1;
    for (auto& [u, c] : lambda)
      d = boost::multiprecision::lcm(d, boost::multiprecision::denominator(c));
    Rational lhs = 1;
    for (auto& [u, c] : lambda) {
      Int num = boost::multiprecision::numerator(c) *
                (d / boost::multiprecision::denominator(c));
      lhs *= rational_pow(p(u), num.convert_to<unsigned long>());
    }
    slack = lhs / rational_pow(p(p.full()), d.convert_to<unsigned long>());
  }
  if (slack < p.unit()) throw invariant_violation("shearer inequality failed");
  return slack;
}

// --- Gamma-polymatroids -------------------------------------------------------

namespace {

std::vector<int> source_map(const BGraph& g, int letter) {
  std::vector<int> phi;
  for (auto& [s, t] : g.edges[letter]) phi.push_back(s);
  return phi;
}

std::vector<int> target_map(const BGraph& g, int letter) {
  std::vector<int> phi;
  for (auto& [s, t] : g.edges[letter]) phi.push_back(t);
  return phi;
}

}  // namespace

PolymatroidReport check_gamma_polymatroid(const GammaPolymatroid& gp) {
  PolymatroidReport r;
  if (gp.hV.n != gp.graph.nv ||
      static_cast<int>(gp.hb.size()) != gp.graph.letters()) {
    r.ok = false;
    r.message = "ground sets do not match the graph";
    return r;
  }
  r = check_polymatroid(gp.hV);
  if (!r.ok) {
    r.message = "vertex table: " + r.message;
    return r;
  }
  for (int l = 0; l < gp.graph.letters(); ++l) {
    if (gp.hb[l].n != static_cast<int>(gp.graph.edges[l].size())) {
      r.ok = false;
      r.message = "edge table size mismatch at letter " + std::to_string(l);
      return r;
    }
    r = check_polymatroid(gp.hb[l]);
    if (!r.ok) {
      r.message = "edge table " + std::to_string(l) + ": " + r.message;
      return r;
    }
    if (!is_morphism(gp.hb[l], gp.hV, source_map(gp.graph, l))) {
      r.ok = false;
      r.message = "source map is not a morphism at letter " + std::to_string(l);
      return r;
    }
    if (!is_morphism(gp.hb[l], gp.hV, target_map(gp.graph, l))) {
      r.ok = false;
      r.message = "target map is not a morphism at letter " + std::to_string(l);
      return r;
    }
  }
  return r;
}

bool is_lossless(const GammaPolymatroid& gp) {
  for (int l = 0; l < gp.graph.letters(); ++l) {
    if (!is_lossless(gp.hb[l], gp.hV, source_map(gp.graph, l))) return false;
    if (!is_lossless(gp.hb[l], gp.hV, target_map(gp.graph, l))) return false;
  }
  return true;
}

Rational gamma_chi(const GammaPolymatroid& gp) {
  Rational acc = gp.hV(gp.hV.full());
  for (auto& hb : gp.hb) acc = gp.hV.split(acc, hb(hb.full()));
  return acc;
}

GammaPolymatroid cardinality_gamma(const BGraph& g) {
  GammaPolymatroid gp;
  gp.graph = g;
  gp.hV = cardinality_polymatroid(g.nv);
  for (int l = 0; l < g.letters(); ++l)
    gp.hb.push_back(cardinality_polymatroid(static_cast<int>(g.edges[l].size())));
  return gp;
}

GammaPolymatroid pullback_polymatroid(const BGraph& dom, const GraphMorphism& eta,
                                      const GammaPolymatroid& gp) {
  if (!validate_morphism(dom, gp.graph, eta, false))
    throw precondition_error("pullback_polymatroid: eta is not a morphism");
  GammaPolymatroid out;
  out.graph = dom;
  out.hV = tabulate(dom.nv, gp.hV.sem,
                    [&](Subset u) { return gp.hV(apply_map(eta.vmap, u)); });
  for (int l = 0; l < dom.letters(); ++l)
    out.hb.push_back(tabulate(static_cast<int>(dom.edges[l].size()), gp.hb[l].sem,
                              [&](Subset u) { return gp.hb[l](apply_map(eta.emap[l], u)); }));
  return out;
}

GammaPolymatroid image_polymatroid(const BGraph& a, const BGraph& delta) {
  Product p = pullback(a, delta);
  GammaPolymatroid out;
  out.graph = a;
  // per a-vertex, the set of delta vertices paired with it in the pullback
  std::vector<std::set<int>> vhits(a.nv);
  for (int v = 0; v < p.graph.nv; ++v) vhits[p.vpair[v].first].insert(p.vpair[v].second);
  out.hV = tabulate(a.nv, Semantics::additive, [&](Subset u) {
    std::set<int> img;
    for (int v = 0; v < a.nv; ++v)
      if (u & (Subset(1) << v)) img.insert(vhits[v].begin(), vhits[v].end());
    return Rational(static_cast<long long>(img.size()));
  });
  for (int l = 0; l < a.letters(); ++l) {
    std::vector<std::set<int>> ehits(a.edges[l].size());
    for (auto& [ea, ed] : p.epair[l]) ehits[ea].insert(ed);
    out.hb.push_back(tabulate(static_cast<int>(a.edges[l].size()), Semantics::additive,
                              [&](Subset u) {
                                std::set<int> img;
                                for (size_t e = 0; e < ehits.size(); ++e)
                                  if (u & (Subset(1) << e))
                                    img.insert(ehits[e].begin(), ehits[e].end());
                                return Rational(static_cast<long long>(img.size()));
                              }));
  }
  return out;
}

bool is_compact(const GammaPolymatroid& gp) {
  if (!is_compact(gp.hV)) return false;
  for (auto& hb : gp.hb)
    if (!is_compact(hb)) return false;
  return true;
}

namespace {

// If g is the cycle graph of a cyclically reduced word, returns that word
// (up to rotation/inversion, which does not affect power-ness).
std::optional<Word> cycle_word(const BGraph& g) {
  if (g.nv == 0 || !g.connected()) return std::nullopt;
  if (g.edge_count() != g.nv) return std::nullopt;
  for (int v = 0; v < g.nv; ++v)
    if (g.degree(v) != 2) return std::nullopt;
  if (!g.folded()) return std::nullopt;
  // Walk the cycle from vertex 0, never re-traversing the arrival edge.
  Word w;
  int v = 0;
  int prev_letter = -1, prev_sign = 0;
  for (long long step = 0; step < g.edge_count(); ++step) {
    bool moved = false;
    for (int l = 0; l < g.letters() && !moved; ++l) {
      auto oe = g.out_edge(v, l);
      // a unique out l-edge that is the arrival edge iff we just went l^-1
      if (oe && !(step > 0 && l == prev_letter && prev_sign == -1)) {
        w.syl.emplace_back(l, +1);
        v = g.edges[l][*oe].second;
        prev_letter = l;
        prev_sign = +1;
        moved = true;
        break;
      }
      auto ie = g.in_edge(v, l);
      if (ie && !(step > 0 && l == prev_letter && prev_sign == +1)) {
        w.syl.emplace_back(l, -1);
        v = g.edges[l][*ie].first;
        prev_letter = l;
        prev_sign = -1;
        moved = true;
      }
    }
    if (!moved) return std::nullopt;
  }
  if (v != 0) return std::nullopt;
  Word r = w;
  r.reduce();
  if (r.length() != static_cast<int>(g.edge_count())) return std::nullopt;
  return r;
}

}  // namespace

GapCertificate verify_gap_certificate(const GammaPolymatroid& gp, GapMode mode) {
  const BGraph& g = gp.graph;
  if (!g.connected()) throw precondition_error("gap certificate: graph not connected");
  if (mode == GapMode::nonabelian) {
    if (g.rank() <= 1) throw precondition_error("gap certificate: rank must exceed 1");
  } else {
    auto w = cycle_word(g);
    if (!w) throw precondition_error("gap certificate: graph is not a cycle graph");
    if (is_proper_power(*w))
      throw precondition_error("gap certificate: cycle word is a proper power");
    if (!is_compact(gp))
      throw precondition_error("gap certificate: table is not compact");
  }
  Rational chi = gamma_chi(gp);
  for (int l = 0; l < g.letters(); ++l)
    for (size_t e = 0; e < g.edges[l].size(); ++e) {
      // chi <= -hb({e}), i.e. chi "plus" hb({e}) at most the unit
      if (gp.hV.comb(chi, gp.hb[l](Subset(1) << e)) <= gp.hV.unit())
        return GapCertificate{l, static_cast<int>(e)};
    }
  throw invariant_violation("gap certificate: no certificate exists");
}

Rational tree_bound(const GammaPolymatroid& gp, const Stacking& s,
                    const std::vector<char>& tree_edge) {
  const BGraph& g = gp.graph;
  if (!g.connected()) throw precondition_error("tree_bound: graph not connected");
  if (!(s.graph.canonical_encoding() == g.canonical_encoding()) ||
      s.graph.nv != g.nv)
    throw precondition_error("tree_bound: stacking is for a different graph");
  if (!s.valid()) throw precondition_error("tree_bound: invalid stacking");
  if (static_cast<long long>(tree_edge.size()) != g.edge_count())
    throw precondition_error("tree_bound: bad tree flag size");
  // verify spanning tree: nv-1 edges connecting all vertices
  long long tcount = 0;
  {
    std::vector<int> parent(g.nv);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
      return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (int l = 0; l < g.letters(); ++l)
      for (size_t e = 0; e < g.edges[l].size(); ++e)
        if (tree_edge[edge_id(g, l, static_cast<int>(e))]) {
          ++tcount;
          auto [a, b] = g.edges[l][e];
          parent[find(a)] = find(b);
        }
    if (tcount != g.nv - 1) throw precondition_error("tree_bound: not a spanning tree");
    for (int v = 1; v < g.nv; ++v)
      if (find(v) != find(0)) throw precondition_error("tree_bound: not a spanning tree");
  }
  // vertex ordering by height
  std::vector<int> vorder(g.nv);
  std::iota(vorder.begin(), vorder.end(), 0);
  std::sort(vorder.begin(), vorder.end(),
            [&](int a, int b) { return s.heights[a] < s.heights[b]; });
  std::vector<Rational> dv = marginal_gains(gp.hV, vorder);
  Rational bound = dv[vorder[0]];
  for (int v : vorder) bound = std::min(bound, dv[v]);
  for (int l = 0; l < g.letters(); ++l) {
    if (g.edges[l].empty()) continue;
    std::vector<Rational> de = marginal_gains(gp.hb[l], s.edge_order(l));
    for (size_t e = 0; e < g.edges[l].size(); ++e)
      if (!tree_edge[edge_id(g, l, static_cast<int>(e))])
        bound = gp.hV.split(bound, de[e]);
  }
  if (!(gamma_chi(gp) <= bound)) throw invariant_violation("tree bound violated");
  return bound;
}

}  // namespace stlab
