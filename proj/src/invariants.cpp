#include "stlab/invariants.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>

#include "stlab/errors.hpp"

namespace stlab {

namespace {

void require_based(const BGraph& g) {
  if (g.empty() || g.basepoint < 0 || !g.connected())
    throw precondition_error("connected basepointed graph required");
}

// Subgraph spanned by the component of v, cored keeping the basepoint.
BGraph cored_component(const BGraph& g, int v) {
  std::vector<int> comp = g.component_ids();
  int cid = comp[v];
  std::vector<int> newid(g.nv, -1);
  int nv = 0;
  for (int u = 0; u < g.nv; ++u)
    if (comp[u] == cid) newid[u] = nv++;
  BGraph out(g.alphabet, nv, newid[v]);
  for (int l = 0; l < g.letters(); ++l)
    for (auto [s, t] : g.edges[l])
      if (comp[s] == cid) out.add_edge(l, newid[s], newid[t]);
  return core(out, /*keep_basepoint=*/true).graph;
}

// The quotient stays jointly injective with the covering projection iff it
// never merges two vertices of the same fiber (vertices are v*d + sheet).
bool fibers_stay_injective(const std::vector<int>& part, int nv_base, int d) {
  for (int v = 0; v < nv_base; ++v)
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        if (part[v * d + i] == part[v * d + j]) return false;
  return true;
}

bool every_delta_edge_covered_twice(const BGraph& total, const Quotient& q) {
  for (int l = 0; l < total.letters(); ++l) {
    std::map<std::pair<int, int>, int> mult;
    for (auto [s, t] : total.edges[l]) ++mult[{q.part[s], q.part[t]}];
    for (auto& [e, c] : mult)
      if (c < 2) return false;
  }
  return true;
}

struct SearchOpts {
  bool trivial_only = false;
  bool connected_delta = false;
  bool require_not_iso = false;
  bool edge_mult_two = false;
};

InvariantReport covering_quotient_min(const BGraph& g, int d, const SearchOpts& o,
                                      int quotient_cap, long long covering_cap) {
  require_based(g);
  if (d < 1) throw precondition_error("covering degree must be positive");
  InvariantReport rep;
  rep.method = "exact";
  rep.quotient_cap = quotient_cap;
  rep.covering_cap = covering_cap;

  long long r = g.rank();
  std::vector<std::vector<std::vector<int>>> monodromies;
  if (o.trivial_only) {
    std::vector<int> id(d);
    std::iota(id.begin(), id.end(), 0);
    monodromies.push_back(std::vector<std::vector<int>>(r, id));
  } else {
    Int fact = 1;
    for (int i = 2; i <= d; ++i) fact *= i;
    if (pow_int(fact, static_cast<unsigned long>(r)) > Int(covering_cap))
      throw cap_error("covering enumeration cap exceeded");
    monodromies = monodromy_reps_up_to_conjugacy(g, d);
  }

  bool found = false;
  Rational best;
  std::string best_enc;
  for (const auto& mono : monodromies) {
    Covering cov = covering_from_rep(g, mono);
    ++rep.coverings_searched;
    std::vector<Quotient> qs;
    try {
      qs = quotients(cov.total, quotient_cap);
    } catch (const cap_error&) {
      rep.method = "upper-bound";
      rep.note = "quotient cap exceeded; search truncated";
      continue;
    }
    for (const Quotient& q : qs) {
      ++rep.quotients_searched;
      if (!fibers_stay_injective(q.part, g.nv, d)) continue;
      if (o.connected_delta && !q.graph.connected()) continue;
      if (o.require_not_iso && q.graph.nv == cov.total.nv &&
          q.graph.edge_count() == cov.total.edge_count())
        continue;
      if (o.edge_mult_two && !every_delta_edge_covered_twice(cov.total, q)) continue;
      Rational value(-q.graph.chi(), d);
      std::string enc = q.graph.canonical_encoding();
      if (!found || value < best || (value == best && enc < best_enc)) {
        found = true;
        best = value;
        best_enc = enc;
        rep.certificate = InvariantCertificate{d, mono, q.part, q.graph};
      }
    }
  }
  if (!found) {
    if (rep.method != "exact") throw cap_error("search truncated before any admissible quotient");
    rep.finite = false;
    rep.note = "no admissible quotient exists in the search space";
    return rep;
  }
  rep.value = best;
  return rep;
}

}  // namespace

PibarResult pibar_exact(const BGraph& g, int quotient_cap) {
  require_based(g);
  PibarResult out;
  long long best = -1;
  std::map<std::string, BGraph> minimizers;
  for (const Quotient& q : quotients(g, quotient_cap)) {
    ++out.quotients_searched;
    long long rank = q.graph.rank();
    if (best < 0 || rank < best) {
      best = rank;
      minimizers.clear();
    }
    if (rank == best) {
      BGraph cored = core(q.graph, /*keep_basepoint=*/true).graph;
      minimizers.emplace(cored.canonical_encoding(), std::move(cored));
    }
  }
  out.value = best;
  for (auto& [enc, graph] : minimizers) out.crit.push_back(std::move(graph));
  return out;
}

InvariantReport sbar_pi_d_exact(const BGraph& g, int d, int quotient_cap,
                                long long covering_cap) {
  return covering_quotient_min(g, d, SearchOpts{}, quotient_cap, covering_cap);
}

InvariantReport sbar_pi_d_triv_exact(const BGraph& g, int d, int quotient_cap) {
  SearchOpts o;
  o.trivial_only = true;
  return covering_quotient_min(g, d, o, quotient_cap, 1);
}

InvariantReport spi_d_upper(const BGraph& g, int d, int quotient_cap,
                            long long covering_cap) {
  require_based(g);
  bool cyclic = g.rank() == 1;
  SearchOpts o;
  o.connected_delta = true;
  o.require_not_iso = true;
  o.edge_mult_two = cyclic;
  InvariantReport rep = covering_quotient_min(g, d, o, quotient_cap, covering_cap);
  if (!cyclic) {
    rep.method = "upper-bound (algebraicity unchecked)";
  } else {
    if (rep.method == "exact") rep.method = "upper-bound";
    Word w = free_basis(g, g.basepoint)[0];
    if (is_proper_power(cyclic_reduce(w))) {
      std::string note = "generator is a proper power; stable primitivity rank 0 expected";
      rep.note = rep.note.empty() ? note : rep.note + "; " + note;
    }
  }
  return rep;
}

CritLatticeReport crit_lattice_check(const BGraph& g, int quotient_cap) {
  PibarResult pr = pibar_exact(g, quotient_cap);
  CritLatticeReport out;
  out.pibar = pr.value;
  out.crit_size = static_cast<long long>(pr.crit.size());
  std::set<std::string> members;
  for (const BGraph& j : pr.crit) members.insert(j.canonical_encoding());

  for (size_t a = 0; a < pr.crit.size(); ++a) {
    for (size_t b = a; b < pr.crit.size(); ++b) {
      const BGraph& ja = pr.crit[a];
      const BGraph& jb = pr.crit[b];
      ++out.pairs_checked;

      // join: wedge the two graphs at their basepoints, fold, core
      BGraph wedge(g.alphabet, ja.nv + jb.nv, ja.basepoint);
      for (int l = 0; l < g.letters(); ++l) {
        for (auto [s, t] : ja.edges[l]) wedge.add_edge(l, s, t);
        for (auto [s, t] : jb.edges[l]) wedge.add_edge(l, ja.nv + s, ja.nv + t);
      }
      std::vector<int> part(wedge.nv);
      std::iota(part.begin(), part.end(), 0);
      part[ja.nv + jb.basepoint] = ja.basepoint;
      BGraph join = core(fold_partition(wedge, part).graph, true).graph;
      if (join.empty() || join.rank() != pr.value ||
          !members.count(join.canonical_encoding()))
        out.join_closed = false;

      // meet: basepoint component of the fiber product, cored
      Product fp = fiber_product(ja, jb);
      int bp = ja.basepoint * jb.nv + jb.basepoint;
      fp.graph.basepoint = bp;
      BGraph meet = cored_component(fp.graph, bp);
      if (meet.empty() || meet.basepoint < 0 || meet.rank() != pr.value ||
          !members.count(meet.canonical_encoding()))
        out.meet_closed = false;
    }
  }
  return out;
}

bool replay_certificate(const BGraph& g, const InvariantCertificate& cert, long long cap) {
  Covering cov = covering_from_rep(g, cert.monodromy);
  if (static_cast<int>(cert.partition.size()) != cov.total.nv) return false;
  if (!fibers_stay_injective(cert.partition, g.nv, cert.d)) return false;
  Quotient q = fold_partition(cov.total, cert.partition);
  if (!isomorphic(q.graph, cert.delta)) return false;
  for (const SubCovering& sc : find_coverings_in_pullback(g, cert.delta, cert.d, false, cap))
    if (sc.monodromy == cert.monodromy) return true;
  return false;
}

}  // namespace stlab
