#pragma once

#include <vector>

#include "stlab/action.hpp"
#include "stlab/bgraph.hpp"
#include "stlab/ffr.hpp"

namespace stlab {

// Symbolic average, over a uniform degree-n covering of cod, of the number of
// injective lifts of dom through eta. Product of one falling factorial per
// codomain vertex fiber divided by one per codomain edge fiber; eta must be
// surjective on vertices and edges.
FallingFactorialRational lift_count(const BGraph& dom, const BGraph& cod,
                                    const GraphMorphism& eta);

// One two-step decomposition dom ->> sigma -> bouquet of the labeling
// morphism. Classes are in bijection with fold-closed vertex partitions.
struct Decomposition {
  Quotient first;         // dom ->> first.graph
  GraphMorphism second;   // first.graph -> bouquet(dom.alphabet)
};

std::vector<Decomposition> decomp2(const BGraph& dom, int cap = 12);

struct MeasureCaps {
  int max_d = 4;
  int max_rank = 3;            // per wedge part
  int max_vertices = 12;       // covering total graph, per wedge part
  long long hom_budget = 100000;
};

// Exact symbolic expectation, over independent uniform permutations in S_n
// (one per letter), of the number of G-orbits of injective d-tuples in [n]
// invariant under the subgroup read off the graph. group is a subgroup of
// S_d given by its element list acting on d points. With group = S_d this
// counts invariant d-subsets; with the trivial group, invariant d-tuples of
// distinct points; with d = 1, common fixed points.
FallingFactorialRational expected_fixed_subsets_symbolic(const BGraph& g, int d,
                                                         const FiniteAction& group,
                                                         const MeasureCaps& caps = {});

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long long samples = 0;
};

// Statistical cross-check of the symbolic expectation at a concrete n.
McEstimate monte_carlo_check(const BGraph& g, int d, const FiniteAction& group, int n,
                             long long samples, unsigned long long seed);

}  // namespace stlab
