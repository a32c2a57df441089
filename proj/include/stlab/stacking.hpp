#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stlab/bgraph.hpp"

namespace stlab {

// A stacking of a graph: an ordering of the vertices ("heights", pairwise
// distinct) such that for every letter, sorting that letter's edges by source
// height also sorts them by target height. The per-letter edge orderings are
// always derived from the heights, never stored.
struct Stacking {
  BGraph graph;
  std::vector<long long> heights;  // one per vertex, pairwise distinct

  bool valid() const;
  // Edge indices of the letter sorted by source height.
  std::vector<int> edge_order(int letter) const;
  // Sum over edges of |height(source) - height(target)|.
  long long length() const;
  // Vertex of minimal height.
  int min_vertex() const;
  int max_vertex() const;
};

// Searches for a stacking; heights are a permutation of 0..nv-1. Complete
// backtracking over height positions with per-letter monotonicity checks;
// deterministic (first solution in a fixed search order). Beyond the cap the
// search runs under a node budget and raises cap_error when it is exhausted.
std::optional<Stacking> find_stacking(const BGraph& g, int cap = 10);

struct MinimalStacking {
  Stacking stacking;
  bool certified = true;  // false when found by annealing (upper bound only)
};

// A stacking of minimal length. Exhaustive for |V| <= 9; beyond that a
// seeded simulated annealing pass gives an uncertified upper bound.
MinimalStacking minimal_stacking(const BGraph& g, int exhaustive_cap = 9,
                                 std::uint64_t seed = 0);

struct VisibleEdge {
  Stacking stacking;
  int letter = -1;
  int edge = -1;                 // sigma-minimal edge of its letter, not in tree
  std::vector<char> tree_edge;   // flattened spanning-tree flags, see edge_id
};

// For a connected stackable graph with chi <= 0: a stacking, a spanning tree
// and a sigma-minimal edge outside the tree. Starts from the given stacking
// and, when every edge at the minimal vertex is a bridge, reorders heights
// (hanging-tree reversal below the closest cycle vertex); falls back to an
// exhaustive search over stackings when the graph is small.
std::optional<VisibleEdge> sigma_min_nonbridge(const BGraph& g, const Stacking& s);

// True iff removing edge (letter, e) disconnects the component it lies in.
bool is_bridge(const BGraph& g, int letter, int e);

struct StackableSubgroup {
  BGraph sigma;          // connected, chi < 0
  GraphMorphism nu;      // immersion sigma -> g
  Stacking stacking;     // stacking of the composite sigma -> bouquet
};

// Heuristic: looks for a stackable subgroup of pi_1(g) generated by
// commutators [v^n, u^m] of random basis loops. Seeded and reproducible.
std::optional<StackableSubgroup> find_stackable_subgroup(const BGraph& g, int attempts,
                                                         std::uint64_t seed);

}  // namespace stlab
