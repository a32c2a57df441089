#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stlab/bgraph.hpp"
#include "stlab/polymatroid.hpp"
#include "stlab/rational.hpp"

namespace stlab {

// A finite group acting on a finite point set. The group is stored as the
// explicit list of permutations of X generated by the given generators
// (element 0 is the identity); all the actions used here are faithful.
struct FiniteAction {
  int points = 0;
  std::vector<std::vector<int>> elements;  // each a permutation of 0..points-1
  bool transitive = false;

  int size() const { return static_cast<int>(elements.size()); }
  int act(int g, int x) const { return elements[g][x]; }

  // Indices of elements fixing every point of xs.
  std::vector<int> stabilizer(const std::vector<int>& xs) const;
  std::vector<int> orbit(int x) const;
  // [G : stabilizer(xs)] as an exact integer.
  Int stabilizer_index(const std::vector<int>& xs) const;
};

// S_n acting on {0..n-1}. |G| = n! must stay within the group cap.
FiniteAction symmetric_action(int n);
// GL_n(F_q), q prime, acting on the q^n - 1 nonzero column vectors.
FiniteAction gl_action(int n, int q);
// S_n acting on the d-element subsets of {0..n-1}.
FiniteAction subsets_action(int n, int d);
// Closure of explicit generator permutations of 0..points-1.
FiniteAction explicit_action(int points, const std::vector<std::vector<int>>& generators);

// A system of equations: one unknown group element per letter, one equation
// alpha(b).f(s(e)) = f(t(e)) per edge.
struct EquationSystem {
  BGraph graph;
  std::vector<int> f;  // vertex -> point of X
};

// Does the assignment alpha (element index per letter) satisfy every edge?
bool is_valid(const EquationSystem& sys, const FiniteAction& action,
              const std::vector<int>& alpha);

// Pr over uniform independent alpha(b) that the system is valid. Exact:
// letters are independent, so the probability factors per letter.
Rational satisfaction_probability(const EquationSystem& sys, const FiniteAction& action);

// Orbit size of f under the diagonal action on X^V: |G| / |pointwise stab|.
Int orbit_size(const FiniteAction& action, const std::vector<int>& f);

// stab(f(v)) contains the intersection of the stabilizers of all other
// values, for every v (the intersection over an empty set is all of G).
bool locally_recoverable(const FiniteAction& action, const std::vector<int>& f);

// Multiplicative table idx(U) = [G : intersection of stab(f(v)), v in U].
Polymatroid action_polymatroid(const FiniteAction& action, const std::vector<int>& f);

// The lossless extension of action_polymatroid over a graph on which (g, f)
// is satisfiable: hb(U) = hV(s(U)) = hV(t(U)). Requires a satisfying alpha
// to exist (checked), which makes the vertex table B-invariant.
GammaPolymatroid action_gamma_polymatroid(const BGraph& g, const FiniteAction& action,
                                          const std::vector<int>& f);

struct ReiterReport {
  Rational p;                 // orbit_size * satisfaction_probability
  bool main_applies = false;  // rank>1, or non-power cycle word + recoverable f
  bool main_ok = false;       // p <= 1/|X| (meaningful when main_applies)
  bool weak_checked = false;  // chi >= 0: p <= |X|^chi
  bool weak_ok = false;
  bool historical_ok = false;  // p <= |X|^{-1/2}, reported only
};

// Verifies the orbit-probability bound. Preconditions: action transitive,
// graph connected and cored (every degree >= 2, up to the basepoint).
ReiterReport reiter_verify(const EquationSystem& sys, const FiniteAction& action);

// E over uniform alpha of the number of common fixed points in X of the
// subgroup read off the graph's loops. Computed two ways (direct enumeration
// of alpha tuples, and sum of satisfaction probabilities over all f); the
// two must agree exactly.
Rational expected_fixed_points_bruteforce(const BGraph& g, const FiniteAction& action,
                                          long long tuple_cap = 100000000);

}  // namespace stlab
