#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stlab/bgraph.hpp"
#include "stlab/rational.hpp"
#include "stlab/stacking.hpp"

namespace stlab {

// Subsets of a ground set of size <= 20 are bitmasks.
using Subset = std::uint32_t;

// Value semantics of a polymatroid table.
//
// additive: values are the rank function itself (exact rationals),
//   h(empty) = 0, h(A) + h(B) >= h(A u B) + h(A n B).
// multiplicative: values are exponentials of the rank function -- positive
//   integers such as group indices -- and every comparison is done on
//   products: idx(empty) = 1, idx(A) * idx(B) >= idx(A u B) * idx(A n B).
//   The underlying rank is the (never materialized) logarithm.
enum class Semantics { additive, multiplicative };

struct Polymatroid {
  int n = 0;  // |ground|, elements 0..n-1
  Semantics sem = Semantics::additive;
  std::vector<Rational> table;  // size 1 << n, indexed by subset bitmask

  Polymatroid() = default;
  Polymatroid(int ground, Semantics s);

  Subset full() const { return static_cast<Subset>((1u << n) - 1); }
  const Rational& operator()(Subset u) const { return table[u]; }
  Rational& at(Subset u) { return table[u]; }

  // Identity of the semantics: 0 for additive, 1 for multiplicative.
  Rational unit() const;
  // "Sum" of two values: + or *.
  Rational comb(const Rational& a, const Rational& b) const;
  // "Difference": - or /.
  Rational split(const Rational& a, const Rational& b) const;
};

// Builds an explicit table from a callback (|ground| <= 20).
Polymatroid tabulate(int ground, Semantics sem,
                     const std::function<Rational(Subset)>& h);

// Cardinality polymatroid h(U) = |U| (additive).
Polymatroid cardinality_polymatroid(int ground);

struct PolymatroidReport {
  bool ok = true;
  std::string message;  // first violation, if any
};

// Verifies h(empty) = unit, monotonicity and submodularity (via the
// equivalent local increment conditions), reporting the first violation.
PolymatroidReport check_polymatroid(const Polymatroid& p);

// Strong-map condition for phi: ground(p1) -> ground(p2):
// h1(U') - h1(U) >= h2(phi U') - h2(phi U) for all U inside U'.
bool is_morphism(const Polymatroid& p1, const Polymatroid& p2,
                 const std::vector<int>& phi);
// h2(phi U) = h1(U) for all U.
bool is_lossless(const Polymatroid& p1, const Polymatroid& p2,
                 const std::vector<int>& phi);

Subset apply_map(const std::vector<int>& phi, Subset u);

// h(U | T) = h(U u T) - h(T), restricted to the same ground set.
Polymatroid contraction(const Polymatroid& p, Subset t);

// True iff h(ground \ {v}) = h(ground) for every v (no co-loops).
bool is_compact(const Polymatroid& p);

// Marginal gains under an ordering (a bijection ground -> 0..n-1 given as
// order[i] = i-th element). delta_v = h(first i) - h(first i-1).
std::vector<Rational> marginal_gains(const Polymatroid& p, const std::vector<int>& order);

// Shearer: for a fractional supercover lambda (sum over U containing v of
// lambda(U) >= 1 for all v), asserts <lambda, h> >= h(ground) and returns the
// slack (additive: difference >= 0; multiplicative: ratio >= 1, computed with
// integer powers at the common denominator of lambda).
Rational shearer_check(const Polymatroid& p,
                       const std::vector<std::pair<Subset, Rational>>& lambda);

// --- Gamma-polymatroids -------------------------------------------------------

struct GammaPolymatroid {
  BGraph graph;
  Polymatroid hV;                // ground = V(graph)
  std::vector<Polymatroid> hb;   // per letter, ground = E_b(graph)
};

// Verifies each table, plus: source and target maps E_b -> V are morphisms.
PolymatroidReport check_gamma_polymatroid(const GammaPolymatroid& gp);
bool is_lossless(const GammaPolymatroid& gp);

// hV(V) - sum_b hb(E_b); multiplicative tables give the ratio
// idxV(V) / prod_b idxb(E_b) (the exponential of the characteristic).
Rational gamma_chi(const GammaPolymatroid& gp);

// Cardinality tables on every ground set; gamma_chi equals chi(graph).
GammaPolymatroid cardinality_gamma(const BGraph& g);

// eta* gp: h(U) = h(eta(U)) on the domain of eta.
GammaPolymatroid pullback_polymatroid(const BGraph& dom, const GraphMorphism& eta,
                                      const GammaPolymatroid& gp);

// From the pullback P of (a, delta): hV(U) = #{v in V(delta) paired in P with
// some u in U}, and likewise per letter on edges. Additive integer counts.
GammaPolymatroid image_polymatroid(const BGraph& a, const BGraph& delta);

bool is_compact(const GammaPolymatroid& gp);

enum class GapMode { nonabelian, nonpower_compact };

struct GapCertificate {
  int letter = -1;
  int edge = -1;
};

// Certificate for chi(gp) <= -hb({e}): the lexicographically smallest
// (letter, edge) satisfying the inequality. Checks the hypotheses
// (mode nonabelian: connected with rank > 1; mode nonpower_compact: cycle
// graph of a non-power word and gp compact) and throws invariant_violation
// when no certificate exists.
GapCertificate verify_gap_certificate(const GammaPolymatroid& gp, GapMode mode);

// min_v deltaV_v - delta(Gamma \ T) for the stacking-induced orderings;
// asserts chi(gp) <= bound. tree_edge flags are flattened as in edge_id.
// For multiplicative tables the returned value is the exponential of the
// bound and the assertion is the corresponding ratio comparison.
Rational tree_bound(const GammaPolymatroid& gp, const Stacking& s,
                    const std::vector<char>& tree_edge);

}  // namespace stlab
