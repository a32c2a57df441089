#include "stlab/action.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "stlab/errors.hpp"

namespace stlab {

namespace {

constexpr int kGroupCap = 100000;

std::vector<int> compose(const std::vector<int>& a, const std::vector<int>& b) {
  // (a*b)(x) = a(b(x))
  std::vector<int> c(a.size());
  for (size_t x = 0; x < a.size(); ++x) c[x] = a[b[x]];
  return c;
}

void finish(FiniteAction& act) {
  // identity first, rest sorted for determinism
  std::vector<int> id(act.points);
  std::iota(id.begin(), id.end(), 0);
  std::sort(act.elements.begin(), act.elements.end());
  auto it = std::find(act.elements.begin(), act.elements.end(), id);
  if (it == act.elements.end()) throw invariant_violation("group without identity");
  std::rotate(act.elements.begin(), it, it + 1);
  act.transitive =
      act.points > 0 && static_cast<int>(act.orbit(0).size()) == act.points;
}

}  // namespace

std::vector<int> FiniteAction::stabilizer(const std::vector<int>& xs) const {
  std::vector<int> out;
  for (int g = 0; g < size(); ++g) {
    bool fixes = true;
    for (int x : xs)
      if (elements[g][x] != x) { fixes = false; break; }
    if (fixes) out.push_back(g);
  }
  return out;
}

std::vector<int> FiniteAction::orbit(int x) const {
  std::set<int> seen{x};
  std::queue<int> q;
  q.push(x);
  while (!q.empty()) {
    int y = q.front();
    q.pop();
    for (auto& g : elements)
      if (seen.insert(g[y]).second) q.push(g[y]);
  }
  return std::vector<int>(seen.begin(), seen.end());
}

Int FiniteAction::stabilizer_index(const std::vector<int>& xs) const {
  return Int(size()) / Int(stabilizer(xs).size());
}

FiniteAction explicit_action(int points, const std::vector<std::vector<int>>& generators) {
  if (points <= 0) throw precondition_error("action needs a nonempty point set");
  for (auto& g : generators) {
    if (static_cast<int>(g.size()) != points)
      throw precondition_error("generator has wrong size");
    std::vector<char> seen(points, 0);
    for (int x : g) {
      if (x < 0 || x >= points || seen[x])
        throw precondition_error("generator is not a permutation");
      seen[x] = 1;
    }
  }
  FiniteAction act;
  act.points = points;
  std::vector<int> id(points);
  std::iota(id.begin(), id.end(), 0);
  std::set<std::vector<int>> closure{id};
  std::queue<std::vector<int>> q;
  q.push(id);
  while (!q.empty()) {
    auto g = q.front();
    q.pop();
    for (auto& gen : generators) {
      auto h = compose(gen, g);
      if (closure.insert(h).second) {
        if (static_cast<int>(closure.size()) > kGroupCap)
          throw cap_error("group closure exceeds cap");
        q.push(h);
      }
    }
  }
  act.elements.assign(closure.begin(), closure.end());
  finish(act);
  return act;
}

FiniteAction symmetric_action(int n) {
  if (n < 1) throw precondition_error("symmetric_action: n >= 1");
  long long fact = 1;
  for (int i = 2; i <= n; ++i) fact *= i;
  if (fact > kGroupCap) throw cap_error("symmetric group exceeds cap");
  FiniteAction act;
  act.points = n;
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  do act.elements.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  finish(act);
  return act;
}

namespace {

bool is_prime(int q) {
  if (q < 2) return false;
  for (int d = 2; d * d <= q; ++d)
    if (q % d == 0) return false;
  return true;
}

}  // namespace

FiniteAction gl_action(int n, int q) {
  if (!is_prime(q)) throw precondition_error("gl_action: q must be prime");
  if (n < 1 || n > 3) throw precondition_error("gl_action: n in 1..3");
  long long npts = 1;
  for (int i = 0; i < n; ++i) npts *= q;
  npts -= 1;  // nonzero vectors
  // vector <-> index: index+1 written in base q gives the coordinates
  auto vec_of = [&](long long idx) {
    std::vector<int> v(n);
    long long x = idx + 1;
    for (int i = 0; i < n; ++i) { v[i] = static_cast<int>(x % q); x /= q; }
    return v;
  };
  auto idx_of = [&](const std::vector<int>& v) {
    long long x = 0;
    for (int i = n - 1; i >= 0; --i) x = x * q + v[i];
    return x - 1;
  };
  // enumerate all invertible matrices (row-major, entries mod q)
  long long nmats = 1;
  for (int i = 0; i < n * n; ++i) {
    nmats *= q;
    if (nmats > 10000000) throw cap_error("gl_action: matrix space too large");
  }
  FiniteAction act;
  act.points = static_cast<int>(npts);
  for (long long code = 0; code < nmats; ++code) {
    std::vector<std::vector<int>> m(n, std::vector<int>(n));
    long long c = code;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) { m[i][j] = static_cast<int>(c % q); c /= q; }
    // invertibility via determinant-free rank computation mod q
    auto rows = m;
    int rank = 0;
    for (int col = 0; col < n; ++col) {
      int piv = -1;
      for (int r = rank; r < n; ++r)
        if (rows[r][col] % q != 0) { piv = r; break; }
      if (piv < 0) continue;
      std::swap(rows[rank], rows[piv]);
      // normalize and eliminate
      int inv = 1;
      for (int k = 1; k < q; ++k)
        if (rows[rank][col] * k % q == 1) inv = k;
      for (int j = 0; j < n; ++j) rows[rank][j] = rows[rank][j] * inv % q;
      for (int r = 0; r < n; ++r) {
        if (r == rank || rows[r][col] == 0) continue;
        int factor = rows[r][col];
        for (int j = 0; j < n; ++j)
          rows[r][j] = ((rows[r][j] - factor * rows[rank][j]) % q + q) % q;
      }
      ++rank;
    }
    if (rank != n) continue;
    std::vector<int> perm(act.points);
    for (int x = 0; x < act.points; ++x) {
      std::vector<int> v = vec_of(x), w(n, 0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) w[i] = (w[i] + m[i][j] * v[j]) % q;
      perm[x] = static_cast<int>(idx_of(w));
    }
    act.elements.push_back(perm);
    if (static_cast<int>(act.elements.size()) > kGroupCap)
      throw cap_error("gl_action: group exceeds cap");
  }
  finish(act);
  return act;
}

FiniteAction subsets_action(int n, int d) {
  if (d < 1 || d >= n) throw precondition_error("subsets_action: 1 <= d < n");
  FiniteAction base = symmetric_action(n);
  // enumerate d-subsets as sorted index lists, in lexicographic order
  std::vector<std::vector<int>> subs;
  std::vector<int> cur;
  std::function<void(int)> gen = [&](int start) {
    if (static_cast<int>(cur.size()) == d) {
      subs.push_back(cur);
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      gen(i + 1);
      cur.pop_back();
    }
  };
  gen(0);
  std::map<std::vector<int>, int> index;
  for (size_t i = 0; i < subs.size(); ++i) index[subs[i]] = static_cast<int>(i);
  FiniteAction act;
  act.points = static_cast<int>(subs.size());
  for (auto& g : base.elements) {
    std::vector<int> perm(act.points);
    for (int s = 0; s < act.points; ++s) {
      std::vector<int> img;
      for (int x : subs[s]) img.push_back(g[x]);
      std::sort(img.begin(), img.end());
      perm[s] = index[img];
    }
    act.elements.push_back(perm);
  }
  finish(act);
  return act;
}

bool is_valid(const EquationSystem& sys, const FiniteAction& action,
              const std::vector<int>& alpha) {
  if (static_cast<int>(alpha.size()) != sys.graph.letters())
    throw precondition_error("is_valid: one element per letter required");
  for (int l = 0; l < sys.graph.letters(); ++l)
    for (auto& [s, t] : sys.graph.edges[l])
      if (action.act(alpha[l], sys.f[s]) != sys.f[t]) return false;
  return true;
}

Rational satisfaction_probability(const EquationSystem& sys, const FiniteAction& action) {
  if (static_cast<int>(sys.f.size()) != sys.graph.nv)
    throw precondition_error("assignment size mismatch");
  Rational pr = 1;
  for (int l = 0; l < sys.graph.letters(); ++l) {
    if (sys.graph.edges[l].empty()) continue;
    long long good = 0;
    for (int g = 0; g < action.size(); ++g) {
      bool ok = true;
      for (auto& [s, t] : sys.graph.edges[l])
        if (action.act(g, sys.f[s]) != sys.f[t]) { ok = false; break; }
      if (ok) ++good;
    }
    pr *= Rational(good, action.size());
  }
  return pr;
}

Int orbit_size(const FiniteAction& action, const std::vector<int>& f) {
  return action.stabilizer_index(f);
}

bool locally_recoverable(const FiniteAction& action, const std::vector<int>& f) {
  for (size_t v = 0; v < f.size(); ++v) {
    std::vector<int> others;
    for (size_t u = 0; u < f.size(); ++u)
      if (u != v) others.push_back(f[u]);
    // every element fixing all other values must fix f(v)
    for (int g : action.stabilizer(others))
      if (action.act(g, f[v]) != f[v]) return false;
  }
  return true;
}

Polymatroid action_polymatroid(const FiniteAction& action, const std::vector<int>& f) {
  int n = static_cast<int>(f.size());
  return tabulate(n, Semantics::multiplicative, [&](Subset u) {
    std::vector<int> xs;
    for (int v = 0; v < n; ++v)
      if (u & (Subset(1) << v)) xs.push_back(f[v]);
    return Rational(action.stabilizer_index(xs));
  });
}

GammaPolymatroid action_gamma_polymatroid(const BGraph& g, const FiniteAction& action,
                                          const std::vector<int>& f) {
  EquationSystem sys{g, f};
  if (satisfaction_probability(sys, action) == 0)
    throw precondition_error("action_gamma_polymatroid: system is unsatisfiable");
  GammaPolymatroid gp;
  gp.graph = g;
  gp.hV = action_polymatroid(action, f);
  for (int l = 0; l < g.letters(); ++l) {
    gp.hb.push_back(tabulate(
        static_cast<int>(g.edges[l].size()), Semantics::multiplicative, [&](Subset u) {
          Subset sources = 0, targets = 0;
          for (size_t e = 0; e < g.edges[l].size(); ++e)
            if (u & (Subset(1) << e)) {
              sources |= Subset(1) << g.edges[l][e].first;
              targets |= Subset(1) << g.edges[l][e].second;
            }
          const Rational& hs = gp.hV(sources);
          if (hs != gp.hV(targets))
            throw invariant_violation("satisfiable system with non-invariant table");
          return hs;
        }));
  }
  return gp;
}

ReiterReport reiter_verify(const EquationSystem& sys, const FiniteAction& action) {
  const BGraph& g = sys.graph;
  if (!action.transitive) throw precondition_error("reiter_verify: action not transitive");
  if (!g.connected()) throw precondition_error("reiter_verify: graph not connected");
  for (int v = 0; v < g.nv; ++v)
    if (g.degree(v) < 2 && v != g.basepoint)
      throw precondition_error("reiter_verify: graph not cored");
  ReiterReport r;
  r.p = Rational(orbit_size(action, sys.f)) * satisfaction_probability(sys, action);
  Rational invx(1, action.points);
  long long rank = g.rank();
  bool rank1_hypothesis = false;
  if (rank == 1) {
    // cycle graph of a non-power word plus local recoverability
    bool cyclic = true;
    for (int v = 0; v < g.nv; ++v)
      if (g.degree(v) != 2) cyclic = false;
    if (cyclic) {
      // extract the cycle word via the free basis of the unique loop
      auto basis = free_basis(g, g.basepoint >= 0 ? g.basepoint : 0);
      if (basis.size() == 1) {
        Word loop = basis[0];
        // conjugate closure: power-ness of the cycle word
        rank1_hypothesis =
            !is_proper_power(loop) && locally_recoverable(action, sys.f);
      }
    }
  }
  r.main_applies = rank > 1 || rank1_hypothesis;
  if (r.main_applies) {
    r.main_ok = r.p <= invx;
    if (!r.main_ok) throw invariant_violation("orbit-probability bound violated");
  }
  if (g.chi() >= 0) {
    r.weak_checked = true;
    Rational weak = g.chi() == 0 ? Rational(1) : Rational(action.points);
    r.weak_ok = r.p <= weak;
    if (!r.weak_ok) throw invariant_violation("weak orbit-probability bound violated");
  }
  r.historical_ok = r.p * r.p * Rational(action.points) <= 1;
  return r;
}

Rational expected_fixed_points_bruteforce(const BGraph& g, const FiniteAction& action,
                                          long long tuple_cap) {
  if (!g.connected()) throw precondition_error("expected fixed points: graph not connected");
  int nb = g.letters();
  double tuples = 1;
  for (int l = 0; l < nb; ++l) tuples *= action.size();
  if (tuples > static_cast<double>(tuple_cap))
    throw cap_error("expected fixed points: |G|^|B| exceeds cap");
  int base = g.basepoint >= 0 ? g.basepoint : 0;
  std::vector<Word> basis = free_basis(g, base);
  // direct path: enumerate alpha tuples, count common fixed points
  Int total = 0;
  std::vector<int> alpha(nb, 0);
  long long count = 1;
  for (int l = 0; l < nb; ++l) count *= action.size();
  for (long long code = 0; code < count; ++code) {
    long long c = code;
    for (int l = 0; l < nb; ++l) { alpha[l] = static_cast<int>(c % action.size()); c /= action.size(); }
    for (int x = 0; x < action.points; ++x) {
      bool fixed = true;
      for (auto& w : basis) {
        int y = x;
        for (auto& [l, sign] : w.syl) {
          if (sign > 0) {
            y = action.act(alpha[l], y);
          } else {
            // inverse action: find preimage
            const auto& perm = action.elements[alpha[l]];
            int pre = -1;
            for (int z = 0; z < action.points; ++z)
              if (perm[z] == y) { pre = z; break; }
            y = pre;
          }
        }
        if (y != x) { fixed = false; break; }
      }
      if (fixed) ++total;
    }
  }
  Rational direct(total, Int(count));
  // orbit path: sum of satisfaction probabilities over all assignments
  Rational bysum = 0;
  std::vector<int> f(g.nv, 0);
  long long nass = 1;
  for (int v = 0; v < g.nv; ++v) {
    nass *= action.points;
    if (nass > tuple_cap) throw cap_error("expected fixed points: |X|^|V| exceeds cap");
  }
  for (long long code = 0; code < nass; ++code) {
    long long c = code;
    for (int v = 0; v < g.nv; ++v) { f[v] = static_cast<int>(c % action.points); c /= action.points; }
    bysum += satisfaction_probability(EquationSystem{g, f}, action);
  }
  if (direct != bysum)
    throw invariant_violation("fixed-point expectation paths disagree");
  return direct;
}

}  // namespace stlab
