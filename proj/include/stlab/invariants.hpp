#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stlab/bgraph.hpp"
#include "stlab/rational.hpp"

namespace stlab {

// A witness for a covering/quotient search minimum: a degree-d covering of
// the subgroup graph given by its monodromy, a fold-closed partition of the
// covering's vertices, and the resulting quotient graph.
struct InvariantCertificate {
  int d = 1;
  std::vector<std::vector<int>> monodromy;  // one permutation per basis loop
  std::vector<int> partition;               // covering vertex -> block
  BGraph delta;
};

struct InvariantReport {
  Rational value;
  bool finite = true;  // false when no admissible quotient exists in the search space
  std::string method;  // "exact", "upper-bound", "upper-bound (algebraicity unchecked)"
  std::optional<InvariantCertificate> certificate;
  std::string note;
  long long coverings_searched = 0;
  long long quotients_searched = 0;
  int quotient_cap = 0;
  long long covering_cap = 0;
};

struct PibarResult {
  long long value = 0;               // minimal rank over folded quotients
  std::vector<BGraph> crit;          // all minimizing quotient graphs, deduped
  long long quotients_searched = 0;
};

// Minimal rank 1 - chi over all folded quotients of a connected basepointed
// core graph, together with the full set of minimizing quotients.
PibarResult pibar_exact(const BGraph& g, int quotient_cap = 12);

// Minimum of -chi(Delta)/d over degree-d coverings of g (up to monodromy
// conjugacy) and fold-closed quotients of the covering that stay jointly
// injective with the covering projection (the covering embeds in the fiber
// product of g and Delta). Exact within the caps; a cap hit downgrades the
// method to "upper-bound".
InvariantReport sbar_pi_d_exact(const BGraph& g, int d, int quotient_cap = 14,
                                long long covering_cap = 100000);

// Same minimum with the covering fixed to d disjoint copies of g.
InvariantReport sbar_pi_d_triv_exact(const BGraph& g, int d, int quotient_cap = 14);

// Same search restricted to connected Delta with the quotient map not an
// isomorphism; for cyclic (rank-1) inputs additionally requires every Delta
// edge to be covered at least twice, which makes the bound certified. For
// non-cyclic inputs the algebraicity of the quotient map is not checked and
// the method field says so.
InvariantReport spi_d_upper(const BGraph& g, int d, int quotient_cap = 14,
                            long long covering_cap = 100000);

struct CritLatticeReport {
  long long pibar = 0;
  long long crit_size = 0;
  long long pairs_checked = 0;
  bool join_closed = true;  // fold of the wedge of two critical overgroups is critical
  bool meet_closed = true;  // basepointed pullback of two critical overgroups is critical
};

// Checks that the set of minimizing quotients is closed under joins (fold of
// the wedge at the basepoint) and meets (basepoint component of the pullback).
CritLatticeReport crit_lattice_check(const BGraph& g, int quotient_cap = 12);

// Replays a certificate: the claimed covering of g must appear among the
// coverings embeddable in the fiber product of g and the claimed Delta.
bool replay_certificate(const BGraph& g, const InvariantCertificate& cert,
                        long long cap = 2000000);

}  // namespace stlab
