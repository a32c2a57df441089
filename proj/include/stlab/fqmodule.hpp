#pragma once

#include <map>
#include <optional>
#include <vector>

#include "stlab/bgraph.hpp"
#include "stlab/fq.hpp"
#include "stlab/rational.hpp"
#include "stlab/word.hpp"

namespace stlab {

// --- free group algebra modules ----------------------------------------------

// A monomial e_i * w of the free module K[F]^m. Ordered by ShortLex on the
// word first, then by coordinate index, so e_m is the largest unit monomial.
struct Monomial {
  int i = 0;  // coordinate, 0-based
  Word w;

  bool operator==(const Monomial& o) const { return i == o.i && w == o.w; }
  bool operator<(const Monomial& o) const {
    if (w == o.w) return i < o.i;
    return w < o.w;
  }
};

// A finitely supported K-linear combination of monomials.
struct ModuleElement {
  std::map<Monomial, int> c;  // no zero coefficients stored

  bool is_zero() const { return c.empty(); }
  bool operator==(const ModuleElement& o) const { return c == o.c; }
  Monomial leading() const;  // largest monomial; element must be nonzero
};

ModuleElement me_unit(int i);
ModuleElement me_monomial(int i, Word w, int coeff = 1);
// a += s * b
void me_add_scaled(const Fq& f, ModuleElement& a, int s, const ModuleElement& b);
ModuleElement me_add(const Fq& f, const ModuleElement& a, const ModuleElement& b);
ModuleElement me_sub(const Fq& f, const ModuleElement& a, const ModuleElement& b);
ModuleElement me_scale(const Fq& f, int s, const ModuleElement& a);
ModuleElement me_mul_word(const ModuleElement& a, const Word& u);  // right action

// A finitely generated submodule of K[R]^m, where R is the free group on the
// stored ring alphabet (abstract letters for a subgroup basis, or the ambient
// letters themselves).
struct FqSubmodule {
  Fq field;
  int m = 1;
  Alphabet ring;
  std::vector<ModuleElement> gens;
};

// Free ring alphabet with `rank` abstract single-character letters.
Alphabet ring_alphabet(int rank);

// --- representations and M_beta ----------------------------------------------

struct Rep {
  Fq field;
  int d = 1;
  std::vector<Word> basis;    // subgroup basis words over the ambient alphabet
  std::vector<FqMat> images;  // one invertible d x d matrix per basis word
};

int rep_rank(const Rep& rep);
// Evaluates the representation on a word over ring_alphabet(rank) letters.
FqMat rep_eval(const Rep& rep, const Word& h);
// nu(h, i) = e_i h - sum_j beta(h)_{i,j} e_j, with h over the ring letters.
ModuleElement module_nu(const Rep& rep, const Word& h, int i);
// The submodule generated by nu(h, i) over all basis letters h and i < d,
// with the subgroup's basis re-encoded as abstract ring letters.
FqSubmodule m_beta(const Rep& rep);
// Same generators but with the literal basis words over the ambient alphabet:
// the submodule these generate over K[ambient free group].
FqSubmodule m_beta_ambient(const Rep& rep, const Alphabet& ambient);

// --- transversals, bases, ranks ----------------------------------------------

struct Transversal {
  int codim = 0;
  std::vector<Monomial> elements;            // sorted, prefix-closed
  int radius = 0;                            // stabilization radius used
  std::map<Monomial, ModuleElement> pivots;  // leading monomial -> monic row
};

// Finite codimension and a prefix-closed (Schreier) transversal, found by
// growing a ball of monomials until the set of non-leading monomials of the
// collected generator translates is unchanged for two consecutive radii.
Transversal codim_and_transversal(const FqSubmodule& M, int cap = 64, int max_radius = 8);

// Canonical representative of x modulo the span of the pivot rows.
ModuleElement reduce_full(const Fq& f, ModuleElement x,
                          const std::map<Monomial, ModuleElement>& pivots);

// Free basis { f - phi(f) : f in the boundary of the transversal }, where the
// boundary consists of the one-letter positive extensions of transversal
// monomials that leave the transversal, together with the units outside it.
std::vector<ModuleElement> lewin_basis(const FqSubmodule& M, const Transversal& t);

// Rank of M: 0 for the zero module, 1 for a nonzero cyclic module, otherwise
// the Lewin basis size via the finite-codimension route. Throws on failure.
long long module_rank(const FqSubmodule& M, int cap = 64, int max_radius = 8);
// max{0, rank - m}
long long reduced_rank(const FqSubmodule& M, int cap = 64, int max_radius = 8);

struct CoordinateReduction {
  FqSubmodule module;      // restriction to the kept coordinates, reindexed
  std::vector<int> kept;   // old coordinate ids of the kept coordinates
  long long dropped = 0;   // |S|, the number of dropped coordinates
  long long rank = 0;      // rank of the original module
};
// Splits N = N^R (+) span(S) along the coordinates touched by the transversal
// and returns N^R with basis generators; rank(N) = rank(N^R) + |S|.
CoordinateReduction reduce_coordinates(const FqSubmodule& N, int cap = 64, int max_radius = 8);

// --- exploration step classification ------------------------------------------

enum class StepLabel { free_step, forced, coincidence };

// Full order on E_m x F: vertex (i, w) is ranked by ShortLex of
// translate[i]^{-1} w, ties by i (so e_m is the largest unit monomial).
struct Exploration {
  std::vector<Word> translate;  // empty = identity translate on every tree
};

struct ExplorationReport {
  std::vector<Monomial> order;   // the forest sorted by the exploration
  std::vector<StepLabel> labels;
  int radius = 0;  // stabilization radius of the span computations
};

// Classifies each exposure step of the forest as free, forced or coincidence.
// The span of N on exposed vertices is approximated by generator translates
// inside a growing ball, until two consecutive radii agree on all labels.
ExplorationReport classify_exploration(const FqSubmodule& N, const std::vector<Monomial>& forest,
                                       const Exploration& expl = {}, int max_radius = 6);

// --- intertwiners over GL_n(F_q) ----------------------------------------------

struct InterCount {
  Int total;      // q^dim
  Int injective;  // full-rank solutions
  int dim = 0;    // F_q-dimension of the solution space
};

// Solutions M (d x n) of M * alpha(h) = beta(h) * M for every subgroup basis
// word h; alpha maps each ambient letter to a matrix in GL_n(F_q).
InterCount inter_count(const Fq& f, const std::vector<FqMat>& alpha,
                       const std::vector<Word>& hbasis, const std::vector<FqMat>& beta, int d);

struct InterExpectation {
  Rational total;
  Rational injective;
  bool exact = true;
  long long samples = 0;
};

// Average of inter_count over alpha in Hom(F, GL_n(F_q)) (one matrix per
// ambient letter of the subgroup graph); exact when exhaustive, otherwise a
// seeded Monte Carlo estimate.
InterExpectation expected_inter(const BGraph& hgraph, const Rep& rep, int n, bool exhaustive = true,
                                long long samples = 0, unsigned long long seed = 0,
                                long long cap = 100000000);

// Expected number of alpha(H)-invariant d-dimensional subspaces of F_q^n,
// computed both as (1/|GL_d|) sum over representations of the expected number
// of injective intertwiners and by direct invariant-subspace enumeration;
// the two paths must agree.
Rational grassmann_fixed_bruteforce(const BGraph& hgraph, int n, const Fq& f, int d,
                                    long long cap = 100000000);

// --- probes --------------------------------------------------------------------

struct SbarpiQReport {
  bool found = false;
  Rational upper_bound;     // min rank(N)/d - 1 over certified overmodules
  long long min_rank = 0;   // the minimizing rank
  long long certified = 0;  // efficient overmodules with computable rank
  long long skipped = 0;    // efficient overmodules whose rank was unavailable
  long long inspected = 0;
  bool gap_ok = true;  // all certified ranks are >= 2d when rank(H) > 1
};

// Upper bound for the q-analog stable invariant: enumerates overmodules
// N of M_beta (over the ambient ring) generated by one extra element supported
// on E_d times the prefix tree of the subgroup's basis words, keeps the ones
// with E_d independent modulo N, and minimizes rank(N)/d - 1 over those whose
// rank is computable. Power-structure certificates for proper-power cyclic
// subgroups are tried as well.
SbarpiQReport sbarpi_q_probe(const BGraph& hgraph, int d, const Fq& f, int codim_cap = 64,
                             int max_radius = 6, long long candidate_cap = 5000);

struct KhncReport {
  long long codim_f = 0;   // codim of M in K[F]^d
  long long codim_h = 0;   // codim of the intersection in K[H]^d
  long long rank_m = 0;    // rank of M over K[F]
  long long rank_mh = 0;   // rank of M intersect K[H]^d over K[H]
  Rational lhs, rhs;       // rank_mh/d - 1 and (rank_m/d - 1)(rank(H) - 1)
  Rational slack;          // rhs - lhs; the probed inequality predicts slack >= 0
};

// Compares both sides of the intersection-rank inequality for a finite-index
// subgroup H and a finite-codimension submodule M of K[F]^d. Reports only;
// never asserts the inequality.
KhncReport khnc_probe(const BGraph& hgraph, const FqSubmodule& M, int cap = 256,
                      int max_radius = 8);

}  // namespace stlab
