#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stlab/rational.hpp"
#include "stlab/word.hpp"

namespace stlab {

// A finite graph with edges labeled by an alphabet, such that for each letter
// the source map and the target map over that letter's edges are injective.
// Vertices are 0..nv-1. An optional basepoint is tracked (-1 if absent).
struct BGraph {
  Alphabet alphabet;
  int nv = 0;
  int basepoint = -1;
  // edges[letter] = list of (source, target)
  std::vector<std::vector<std::pair<int, int>>> edges;

  explicit BGraph(Alphabet a = Alphabet(), int vertices = 0, int bp = -1)
      : alphabet(std::move(a)), nv(vertices), basepoint(bp),
        edges(alphabet.letters.empty() ? 0 : alphabet.size()) {}

  int letters() const { return alphabet.size(); }
  long long edge_count() const;
  long long chi() const { return nv - edge_count(); }
  bool empty() const { return nv == 0; }

  void add_edge(int letter, int src, int tgt);
  bool folded() const;  // per-letter injectivity of source and target
  // Edge with the given source (resp. target) and letter, if any; graphs are
  // deterministic so there is at most one.
  std::optional<int> out_edge(int v, int letter) const;
  std::optional<int> in_edge(int v, int letter) const;
  int degree(int v) const;

  std::vector<int> component_ids() const;  // per-vertex component index
  int component_count() const;
  bool connected() const;  // exactly one component (false for the empty graph)
  // rank of the fundamental group of the component containing v (1 - chi).
  long long component_rank(int v) const;
  // rank for a connected non-empty graph.
  long long rank() const;

  // Follows word w from vertex v; returns the end vertex or nullopt if the
  // path leaves the graph.
  std::optional<int> walk(int v, const Word& w) const;

  // A canonical encoding, equal for isomorphic graphs (basepoint respected
  // when present). Deterministic labeled graphs make this cheap.
  std::string canonical_encoding() const;
};

bool isomorphic(const BGraph& a, const BGraph& b);

// --- construction -----------------------------------------------------------

BGraph bouquet(const Alphabet& a);  // one vertex, one loop per letter

// Wedge of word loops at a basepoint, folded and cored (keeping the
// basepoint). The Stallings graph of the subgroup generated by the words.
BGraph fold_words(const std::vector<Word>& words, const Alphabet& a);
BGraph fold_strings(const std::vector<std::string>& words, const Alphabet& a);

// Fold in place: identify vertices until per-letter injectivity holds.
// Returns the map old vertex -> new vertex.
std::vector<int> fold_graph(BGraph& g);

struct CoreResult {
  BGraph graph;
  std::vector<int> vmap;  // old vertex -> new id, or -1 if removed
};
// Iteratively removes degree<=1 vertices (keeping the basepoint if asked) and
// tree components. Idempotent.
CoreResult core(const BGraph& g, bool keep_basepoint = true);

// --- products ---------------------------------------------------------------

struct Product {
  BGraph graph;
  std::vector<std::pair<int, int>> vpair;               // vertex -> (u in a, v in b)
  std::vector<std::vector<std::pair<int, int>>> epair;  // per letter, edge -> (ea, eb)
};

Product fiber_product(const BGraph& a, const BGraph& b);
// core of the fiber product (basepoint kept when both factors have one).
Product pullback(const BGraph& a, const BGraph& b);

// chi(a)*chi(b) / (-chi(pullback)); >= 1 on cored pairs with rank(a) > 1.
Rational shnc_ratio(const BGraph& a, const BGraph& b);

// --- morphisms --------------------------------------------------------------

struct GraphMorphism {
  std::vector<int> vmap;               // domain vertex -> codomain vertex
  std::vector<std::vector<int>> emap;  // per letter, domain edge -> codomain edge
};

bool validate_morphism(const BGraph& dom, const BGraph& cod, const GraphMorphism& m,
                       bool check_basepoint = true);
// All label/direction-preserving morphisms dom -> cod (ignoring basepoints).
std::vector<GraphMorphism> enumerate_morphisms(const BGraph& dom, const BGraph& cod);
// Unique morphism with m(from)=to extended by propagation, if consistent.
std::optional<GraphMorphism> morphism_from_seed(const BGraph& dom, const BGraph& cod,
                                                int from, int to);
// Morphism into the bouquet (always exists).
GraphMorphism to_bouquet(const BGraph& g, const BGraph& omega);

// True iff m is a covering map (locally bijective on vertex stars) of dom
// onto a connected cod with all fibers of the stated degree.
bool is_covering(const BGraph& dom, const BGraph& cod, const GraphMorphism& m, int degree);

// --- quotients --------------------------------------------------------------

struct Quotient {
  std::vector<int> part;  // vertex -> block id, blocks numbered by first occurrence
  BGraph graph;           // folded quotient graph; vertex ids = block ids
};

// Closes a vertex partition under folding and returns the quotient.
Quotient fold_partition(const BGraph& g, const std::vector<int>& part);

// All fold-closed vertex partitions with their quotient graphs, via closure
// search from the discrete partition. Requires |V| <= cap.
std::vector<Quotient> quotients(const BGraph& g, int cap = 12);
// Brute-force oracle: enumerate all set partitions (restricted-growth
// strings), fold each, dedup by the closed partition. Small |V| only.
std::vector<Quotient> quotients_bruteforce(const BGraph& g, int cap = 8);

// --- spanning trees and coverings -------------------------------------------

struct SpanningTree {
  int root = -1;
  // tree[v] = (parent vertex, letter, sign) for v != root within root's component
  std::vector<int> parent, letter, sign;
  std::vector<char> in_tree_edge;            // flattened edge flags, see edge_id
  std::vector<std::pair<int, int>> nontree;  // (letter, edge index)
  std::vector<Word> path_from_root;          // reduced word read from root to v
};

long long edge_id(const BGraph& g, int letter, int e);
SpanningTree spanning_tree(const BGraph& g, int root);
// Free basis of pi_1(g, base): one loop word per non-tree edge.
std::vector<Word> free_basis(const BGraph& g, int base);

struct Covering {
  BGraph total;      // vertices encoded as v*d + sheet
  GraphMorphism proj;
  int degree = 1;
  // fiber numbering: sheet i over the basepoint is vertex basepoint*d + i
};

// Covering of a connected basepointed g from monodromy permutations (one per
// free_basis loop, each a permutation of 0..d-1).
Covering covering_from_rep(const BGraph& g, const std::vector<std::vector<int>>& perms);
// Round trip: monodromy permutations of a covering built by covering_from_rep.
std::vector<std::vector<int>> monodromy(const BGraph& g, const Covering& c);
// All (d!)^rank numbered coverings.
std::vector<Covering> enumerate_coverings(const BGraph& g, int d, long long cap = 100000);
// Monodromy representatives up to simultaneous S_d conjugation.
std::vector<std::vector<std::vector<int>>> monodromy_reps_up_to_conjugacy(const BGraph& g,
                                                                          int d);

// All permutations of 0..d-1.
std::vector<std::vector<int>> all_permutations(int d);

// --- coverings inside pullbacks ---------------------------------------------

struct SubCovering {
  std::vector<std::vector<int>> monodromy;  // covering of g, degree d
  GraphMorphism into_delta;                 // q: total -> delta
  // multiset of |q^{-1}(e)| over delta edges, flattened by (letter, edge)
  std::vector<int> delta_edge_multiplicity;
};

// All degree-d coverings of g admitting a morphism q to delta with (p, q)
// jointly injective (i.e. the covering embeds in the fiber product g x delta).
// g must be connected and cored. Coverings are enumerated up to conjugacy of
// monodromy when dedup_conjugacy is set.
std::vector<SubCovering> find_coverings_in_pullback(const BGraph& g, const BGraph& delta,
                                                    int d, bool dedup_conjugacy = false,
                                                    long long cap = 2000000);

}  // namespace stlab
