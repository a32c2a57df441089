#include "stlab/fqmodule.hpp"

#include <algorithm>
#include <queue>
#include <random>
#include <set>

#include "stlab/errors.hpp"

namespace stlab {

// --- module elements ----------------------------------------------------------

Monomial ModuleElement::leading() const {
  if (c.empty()) throw precondition_error("leading monomial of zero");
  return c.rbegin()->first;
}

ModuleElement me_unit(int i) { return me_monomial(i, Word{}); }

ModuleElement me_monomial(int i, Word w, int coeff) {
  ModuleElement e;
  if (coeff != 0) e.c[Monomial{i, std::move(w)}] = coeff;
  return e;
}

void me_add_scaled(const Fq& f, ModuleElement& a, int s, const ModuleElement& b) {
  if (s == 0) return;
  for (const auto& [mono, coeff] : b.c) {
    int v = f.add(a.c.count(mono) ? a.c[mono] : 0, f.mul(s, coeff));
    if (v == 0)
      a.c.erase(mono);
    else
      a.c[mono] = v;
  }
}

ModuleElement me_add(const Fq& f, const ModuleElement& a, const ModuleElement& b) {
  ModuleElement r = a;
  me_add_scaled(f, r, 1, b);
  return r;
}

ModuleElement me_sub(const Fq& f, const ModuleElement& a, const ModuleElement& b) {
  ModuleElement r = a;
  me_add_scaled(f, r, f.neg(1), b);
  return r;
}

ModuleElement me_scale(const Fq& f, int s, const ModuleElement& a) {
  ModuleElement r;
  if (s == 0) return r;
  for (const auto& [mono, coeff] : a.c) r.c[mono] = f.mul(s, coeff);
  return r;
}

ModuleElement me_mul_word(const ModuleElement& a, const Word& u) {
  ModuleElement r;
  for (const auto& [mono, coeff] : a.c) r.c[Monomial{mono.i, mono.w * u}] = coeff;
  return r;
}

Alphabet ring_alphabet(int rank) {
  static const std::string names = "abcdefghijklmnopqrstuvwz";
  if (rank < 0 || rank > static_cast<int>(names.size()))
    throw precondition_error("ring rank out of range");
  return Alphabet::of(names.substr(0, rank));
}

// --- representations ----------------------------------------------------------

int rep_rank(const Rep& rep) { return static_cast<int>(rep.basis.size()); }

FqMat rep_eval(const Rep& rep, const Word& h) {
  const Fq& f = rep.field;
  FqMat m = fq_identity(rep.d);
  for (const auto& [l, s] : h.syl) {
    if (l < 0 || l >= rep_rank(rep)) throw precondition_error("word letter outside basis");
    if (s > 0) {
      m = fq_mul(f, m, rep.images[l]);
    } else {
      auto inv = fq_inverse(f, rep.images[l]);
      if (!inv) throw precondition_error("representation image not invertible");
      m = fq_mul(f, m, *inv);
    }
  }
  return m;
}

ModuleElement module_nu(const Rep& rep, const Word& h, int i) {
  const Fq& f = rep.field;
  FqMat bh = rep_eval(rep, h);
  ModuleElement e = me_monomial(i, h);
  for (int j = 0; j < rep.d; ++j)
    me_add_scaled(f, e, f.neg(bh[i][j]), me_unit(j));
  return e;
}

namespace {

// nu over a literal word: e_i h - sum_j B_{i,j} e_j for a given matrix B
ModuleElement nu_literal(const Fq& f, const Word& h, const FqMat& b, int i, int d) {
  ModuleElement e = me_monomial(i, h);
  for (int j = 0; j < d; ++j) me_add_scaled(f, e, f.neg(b[i][j]), me_unit(j));
  return e;
}

}  // namespace

FqSubmodule m_beta(const Rep& rep) {
  FqSubmodule m;
  m.field = rep.field;
  m.m = rep.d;
  m.ring = ring_alphabet(rep_rank(rep));
  for (int l = 0; l < rep_rank(rep); ++l) {
    if (!fq_invertible(rep.field, rep.images[l]))
      throw precondition_error("representation image not invertible");
    Word h;
    h.syl = {{l, 1}};
    for (int i = 0; i < rep.d; ++i)
      m.gens.push_back(nu_literal(rep.field, h, rep.images[l], i, rep.d));
  }
  return m;
}

FqSubmodule m_beta_ambient(const Rep& rep, const Alphabet& ambient) {
  FqSubmodule m;
  m.field = rep.field;
  m.m = rep.d;
  m.ring = ambient;
  for (int l = 0; l < rep_rank(rep); ++l) {
    if (!fq_invertible(rep.field, rep.images[l]))
      throw precondition_error("representation image not invertible");
    for (const auto& [letter, s] : rep.basis[l].syl)
      if (letter < 0 || letter >= ambient.size())
        throw precondition_error("basis word letter outside the ambient alphabet");
    for (int i = 0; i < rep.d; ++i)
      m.gens.push_back(nu_literal(rep.field, rep.basis[l], rep.images[l], i, rep.d));
  }
  return m;
}

// --- word enumeration and span tables ------------------------------------------

namespace {

std::vector<Word> words_up_to(int rank, int maxlen, long long cap = 2000000) {
  std::vector<Word> out{Word{}};
  size_t lo = 0;
  for (int len = 1; len <= maxlen; ++len) {
    size_t hi = out.size();
    for (size_t idx = lo; idx < hi; ++idx)
      for (int l = 0; l < rank; ++l)
        for (int s : {1, -1}) {
          if (!out[idx].syl.empty() && out[idx].syl.back().first == l &&
              out[idx].syl.back().second == -s)
            continue;
          Word nw = out[idx];
          nw.syl.emplace_back(l, s);
          out.push_back(std::move(nw));
          if (static_cast<long long>(out.size()) > cap)
            throw cap_error("word enumeration cap exceeded");
        }
    lo = hi;
  }
  return out;
}

int element_height(const ModuleElement& e) {
  int h = 0;
  for (const auto& [mono, c] : e.c) h = std::max(h, mono.w.length());
  return h;
}

void insert_row(const Fq& f, std::map<Monomial, ModuleElement>& pivots, ModuleElement row) {
  while (!row.is_zero()) {
    Monomial lead = row.c.rbegin()->first;
    int lc = row.c.rbegin()->second;
    auto it = pivots.find(lead);
    if (it == pivots.end()) {
      pivots.emplace(lead, me_scale(f, f.inv(lc), row));
      return;
    }
    me_add_scaled(f, row, f.neg(lc), it->second);
  }
}

// Leading-reduced spanning rows of all generator translates whose support
// stays inside the radius-R ball.
std::map<Monomial, ModuleElement> translate_table(const FqSubmodule& n, int radius) {
  std::map<Monomial, ModuleElement> table;
  for (const ModuleElement& g : n.gens) {
    if (g.is_zero()) continue;
    int lg = element_height(g);
    for (const Word& u : words_up_to(n.ring.size(), radius + lg)) {
      ModuleElement t = me_mul_word(g, u);
      bool inside = true;
      for (const auto& [mono, c] : t.c)
        if (mono.w.length() > radius) {
          inside = false;
          break;
        }
      if (inside) insert_row(n.field, table, std::move(t));
    }
  }
  return table;
}

// Custom-order elimination: monomials in S rank below monomials outside S, so
// a row whose leading lies in S is supported entirely inside S. The rows with
// leading in S span (row span) intersected with K^S.
struct BlockCmp {
  const std::set<Monomial>* s;
  bool operator()(const Monomial& a, const Monomial& b) const {
    bool ina = s->count(a) > 0, inb = s->count(b) > 0;
    if (ina != inb) return ina;
    return a < b;
  }
};

using BlockTable = std::map<Monomial, ModuleElement, BlockCmp>;

Monomial leading_under(const ModuleElement& x, const BlockCmp& cmp) {
  auto it = x.c.begin();
  Monomial best = it->first;
  for (++it; it != x.c.end(); ++it)
    if (cmp(best, it->first)) best = it->first;
  return best;
}

void insert_row_block(const Fq& f, BlockTable& table, ModuleElement row) {
  const BlockCmp& cmp = table.key_comp();
  while (!row.is_zero()) {
    Monomial lead = leading_under(row, cmp);
    int lc = row.c.at(lead);
    auto it = table.find(lead);
    if (it == table.end()) {
      table.emplace(lead, me_scale(f, f.inv(lc), row));
      return;
    }
    me_add_scaled(f, row, f.neg(lc), it->second);
  }
}

BlockTable block_table(const Fq& f, const std::map<Monomial, ModuleElement>& rows,
                       const std::set<Monomial>& s) {
  BlockTable table(BlockCmp{&s});
  for (const auto& [lead, row] : rows) insert_row_block(f, table, row);
  return table;
}

// dim of span(rows) intersected with K^S
int span_dim_in(const Fq& f, const std::map<Monomial, ModuleElement>& rows,
                const std::set<Monomial>& s) {
  BlockTable table = block_table(f, rows, s);
  int dim = 0;
  for (const auto& [lead, row] : table)
    if (s.count(lead)) ++dim;
  return dim;
}

// true if some element of span(rows) supported inside S has target in support
bool span_witness(const Fq& f, const std::map<Monomial, ModuleElement>& rows,
                  const std::set<Monomial>& s, const Monomial& target) {
  BlockTable table = block_table(f, rows, s);
  for (const auto& [lead, row] : table)
    if (s.count(lead) && row.c.count(target)) return true;
  return false;
}

}  // namespace

// --- transversals ---------------------------------------------------------------

Transversal codim_and_transversal(const FqSubmodule& m, int cap, int max_radius) {
  std::vector<Monomial> prev;
  bool have_prev = false;
  int over_cap_streak = 0;
  for (int radius = 0; radius <= max_radius; ++radius) {
    std::map<Monomial, ModuleElement> pivots = translate_table(m, radius);
    std::vector<Monomial> t;
    for (int i = 0; i < m.m; ++i)
      for (const Word& w : words_up_to(m.ring.size(), radius)) {
        Monomial mo{i, w};
        if (!pivots.count(mo)) t.push_back(mo);
      }
    std::sort(t.begin(), t.end());
    if (static_cast<int>(t.size()) > cap) {
      if (++over_cap_streak >= 2)
        throw cap_error("codimension exceeds cap or is infinite");
    } else {
      over_cap_streak = 0;
    }
    if (have_prev && t == prev && static_cast<int>(t.size()) <= cap) {
      std::set<Monomial> ts(t.begin(), t.end());
      for (const Monomial& mo : t) {
        if (mo.w.empty()) continue;
        Word prefix;
        prefix.syl.assign(mo.w.syl.begin(), mo.w.syl.end() - 1);
        if (!ts.count(Monomial{mo.i, std::move(prefix)}))
          throw invariant_violation("transversal not prefix-closed");
      }
      Transversal out;
      out.codim = static_cast<int>(t.size());
      out.elements = std::move(t);
      out.radius = radius;
      out.pivots = std::move(pivots);
      return out;
    }
    prev = std::move(t);
    have_prev = true;
  }
  throw cap_error("transversal did not stabilize within the radius limit");
}

ModuleElement reduce_full(const Fq& f, ModuleElement x,
                          const std::map<Monomial, ModuleElement>& pivots) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = x.c.rbegin(); it != x.c.rend(); ++it) {
      auto p = pivots.find(it->first);
      if (p != pivots.end()) {
        me_add_scaled(f, x, f.neg(it->second), p->second);
        changed = true;
        break;
      }
    }
  }
  return x;
}

namespace {

std::vector<Monomial> transversal_boundary(const FqSubmodule& m, const Transversal& t) {
  std::set<Monomial> ts(t.elements.begin(), t.elements.end());
  std::set<Monomial> boundary;
  for (int i = 0; i < m.m; ++i) {
    Monomial e{i, Word{}};
    if (!ts.count(e)) boundary.insert(e);
  }
  for (const Monomial& mo : t.elements)
    for (int l = 0; l < m.ring.size(); ++l) {
      Word b;
      b.syl = {{l, 1}};
      Monomial ext{mo.i, mo.w * b};
      if (!ts.count(ext)) boundary.insert(ext);
    }
  return {boundary.begin(), boundary.end()};
}

}  // namespace

std::vector<ModuleElement> lewin_basis(const FqSubmodule& m, const Transversal& t) {
  std::set<Monomial> ts(t.elements.begin(), t.elements.end());
  std::vector<ModuleElement> out;
  for (const Monomial& fmono : transversal_boundary(m, t)) {
    ModuleElement fm = me_monomial(fmono.i, fmono.w);
    ModuleElement phi = reduce_full(m.field, fm, t.pivots);
    for (const auto& [mono, c] : phi.c)
      if (!ts.count(mono))
        throw invariant_violation("boundary element does not reduce into the transversal");
    out.push_back(me_sub(m.field, fm, phi));
  }
  return out;
}

long long module_rank(const FqSubmodule& m, int cap, int max_radius) {
  std::vector<const ModuleElement*> nonzero;
  for (const auto& g : m.gens)
    if (!g.is_zero()) nonzero.push_back(&g);
  if (nonzero.empty()) return 0;
  if (nonzero.size() == 1) return 1;  // a nonzero cyclic module is free of rank 1
  Transversal t = codim_and_transversal(m, cap, max_radius);
  return static_cast<long long>(lewin_basis(m, t).size());
}

long long reduced_rank(const FqSubmodule& m, int cap, int max_radius) {
  long long rk = module_rank(m, cap, max_radius);
  return std::max<long long>(0, rk - m.m);
}

CoordinateReduction reduce_coordinates(const FqSubmodule& n, int cap, int max_radius) {
  Transversal t = codim_and_transversal(n, cap, max_radius);
  std::set<Monomial> ts(t.elements.begin(), t.elements.end());
  std::vector<int> kept, newid(n.m, -1);
  for (int i = 0; i < n.m; ++i)
    if (ts.count(Monomial{i, Word{}})) {
      newid[i] = static_cast<int>(kept.size());
      kept.push_back(i);
    }
  std::vector<Monomial> boundary = transversal_boundary(n, t);
  std::vector<ModuleElement> basis = lewin_basis(n, t);
  CoordinateReduction out;
  out.rank = static_cast<long long>(basis.size());
  out.kept = kept;
  out.dropped = n.m - static_cast<long long>(kept.size());
  if (out.dropped == 0) {
    out.module = n;
    return out;
  }
  FqSubmodule red;
  red.field = n.field;
  red.ring = n.ring;
  red.m = static_cast<int>(kept.size());
  for (size_t k = 0; k < boundary.size(); ++k) {
    const Monomial& fm = boundary[k];
    if (fm.w.empty() && newid[fm.i] < 0) continue;  // the split-off unit directions
    ModuleElement g;
    for (const auto& [mono, c] : basis[k].c) {
      if (newid[mono.i] < 0)
        throw invariant_violation("reduced generator touches a dropped coordinate");
      g.c[Monomial{newid[mono.i], mono.w}] = c;
    }
    red.gens.push_back(std::move(g));
  }
  out.module = std::move(red);
  return out;
}

// --- exploration classification --------------------------------------------------

ExplorationReport classify_exploration(const FqSubmodule& n, const std::vector<Monomial>& forest,
                                       const Exploration& expl, int max_radius) {
  const Fq& f = n.field;
  int m = n.m, r = n.ring.size();
  std::vector<Word> tr = expl.translate;
  if (tr.empty()) tr.assign(m, Word{});
  if (static_cast<int>(tr.size()) != m)
    throw precondition_error("one translate per coordinate required");
  std::vector<Word> trinv;
  trinv.reserve(tr.size());
  for (const Word& w : tr) trinv.push_back(w.inverse());

  for (const Monomial& mo : forest)
    if (mo.i < 0 || mo.i >= m) throw precondition_error("forest coordinate out of range");

  std::vector<Monomial> order = forest;
  auto keyword = [&](const Monomial& mo) { return trinv[mo.i] * mo.w; };
  auto key_less = [&](const Monomial& a, const Monomial& b) {
    Word ka = keyword(a), kb = keyword(b);
    if (ka == kb) return a.i < b.i;
    return ka < kb;
  };
  std::sort(order.begin(), order.end(), key_less);
  for (size_t t = 1; t < order.size(); ++t)
    if (order[t] == order[t - 1]) throw precondition_error("duplicate forest vertex");

  int steps = static_cast<int>(order.size());
  std::vector<int> parent(steps, -1);
  std::vector<std::pair<int, int>> via(steps, {-1, 0});
  for (int t = 0; t < steps; ++t) {
    if (keyword(order[t]).empty()) continue;  // minimal in its tree
    for (int s = 0; s < t; ++s) {
      if (order[s].i != order[t].i) continue;
      Word diff = order[s].w.inverse() * order[t].w;
      if (diff.length() == 1) {
        parent[t] = s;
        via[t] = diff.syl[0];
        break;
      }
    }
    if (parent[t] < 0)
      throw precondition_error(
          "order is not an exploration of the forest: a vertex has no earlier neighbor");
  }

  int base = 1;
  for (int t = 0; t < steps; ++t) {
    base = std::max(base, order[t].w.length() + 1);
    base = std::max(base, tr[order[t].i].length() + keyword(order[t]).length() + 1);
  }
  for (const ModuleElement& g : n.gens)
    if (!g.is_zero()) base = std::max(base, element_height(g) + 1);

  std::vector<StepLabel> labels_prev;
  bool have = false;
  for (int radius = base; radius <= base + max_radius; ++radius) {
    std::map<Monomial, ModuleElement> rows = translate_table(n, radius);
    std::vector<StepLabel> labels(steps, StepLabel::free_step);
    for (int t = 0; t < steps; ++t) {
      const Monomial& vt = order[t];
      Word ut = keyword(vt);
      // all vertices exposed up to and including this step, over the whole
      // ambient tree (not only the forest)
      std::set<Monomial> exposed;
      for (int j = 0; j < m; ++j)
        for (const Word& y : words_up_to(r, ut.length()))
          if (y < ut || (y == ut && j <= vt.i)) exposed.insert(Monomial{j, tr[j] * y});
      bool forced = false;
      if (parent[t] >= 0) {
        Word bw;
        bw.syl = {via[t]};
        std::set<Monomial> dset;
        for (const Monomial& z : exposed) {
          Word yb = (trinv[z.i] * z.w) * bw;
          if (yb < ut || (yb == ut && z.i <= vt.i)) dset.insert(z);
        }
        forced = span_witness(f, rows, dset, order[parent[t]]);
      }
      if (forced) {
        labels[t] = StepLabel::forced;
      } else if (span_witness(f, rows, exposed, vt)) {
        labels[t] = StepLabel::coincidence;
      }
    }
    if (have && labels == labels_prev) {
      ExplorationReport rep;
      rep.order = std::move(order);
      rep.labels = std::move(labels);
      rep.radius = radius;
      return rep;
    }
    labels_prev = std::move(labels);
    have = true;
  }
  throw cap_error("step classification did not stabilize within the radius limit");
}

// --- intertwiners ----------------------------------------------------------------

namespace {

FqMat eval_on(const Fq& f, const std::vector<FqMat>& mats, const std::vector<FqMat>& invs,
              const Word& w, int n) {
  FqMat m = fq_identity(n);
  for (const auto& [l, s] : w.syl) m = fq_mul(f, m, s > 0 ? mats[l] : invs[l]);
  return m;
}

std::vector<FqMat> invert_all(const Fq& f, const std::vector<FqMat>& mats) {
  std::vector<FqMat> invs;
  invs.reserve(mats.size());
  for (const FqMat& m : mats) {
    auto inv = fq_inverse(f, m);
    if (!inv) throw precondition_error("letter image not invertible");
    invs.push_back(std::move(*inv));
  }
  return invs;
}

int binom2(int k) { return k * (k - 1) / 2; }

}  // namespace

InterCount inter_count(const Fq& f, const std::vector<FqMat>& alpha,
                       const std::vector<Word>& hbasis, const std::vector<FqMat>& beta, int d) {
  if (alpha.empty()) throw precondition_error("ambient letters required");
  if (hbasis.size() != beta.size())
    throw precondition_error("one image matrix per basis word required");
  int n = static_cast<int>(alpha[0].size());
  for (const FqMat& b : beta)
    if (static_cast<int>(b.size()) != d) throw precondition_error("image dimension mismatch");
  std::vector<FqMat> invs = invert_all(f, alpha);

  FqMat eq;  // rows: equations over the n*d unknowns M_{a,b}
  for (size_t k = 0; k < hbasis.size(); ++k) {
    for (const auto& [l, s] : hbasis[k].syl)
      if (l < 0 || l >= static_cast<int>(alpha.size()))
        throw precondition_error("basis word letter outside the ambient alphabet");
    FqMat a = eval_on(f, alpha, invs, hbasis[k], n);
    const FqMat& b = beta[k];
    for (int row = 0; row < d; ++row)
      for (int j = 0; j < n; ++j) {
        std::vector<int> e(n * d, 0);
        for (int col = 0; col < n; ++col) e[row * n + col] = f.add(e[row * n + col], a[col][j]);
        for (int c = 0; c < d; ++c) e[c * n + j] = f.sub(e[c * n + j], b[row][c]);
        eq.push_back(std::move(e));
      }
  }

  auto solution_dim = [&](const FqMat& extra) {
    FqMat sys = eq;
    for (const auto& row : extra) sys.push_back(row);
    if (sys.empty()) return n * d;
    return static_cast<int>(fq_nullspace(f, sys).size());
  };

  InterCount out;
  out.dim = solution_dim({});
  out.total = pow_int(Int(f.q), static_cast<unsigned long>(out.dim));
  if (d > n) {
    out.injective = 0;
    return out;
  }
  Int combos = out.total;
  if (combos <= Int(1 << 20)) {
    std::vector<std::vector<int>> null;
    if (!eq.empty()) {
      null = fq_nullspace(f, eq);
    } else {
      for (int i = 0; i < n * d; ++i) {
        std::vector<int> v(n * d, 0);
        v[i] = 1;
        null.push_back(std::move(v));
      }
    }
    long long count = 0;
    std::vector<int> digits(null.size(), 0);
    while (true) {
      FqMat m = fq_zero(d, n);
      for (size_t k = 0; k < null.size(); ++k) {
        if (digits[k] == 0) continue;
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < n; ++b)
            m[a][b] = f.add(m[a][b], f.mul(digits[k], null[k][a * n + b]));
      }
      if (fq_rank(f, m) == d) ++count;
      size_t k = 0;
      while (k < null.size() && ++digits[k] == f.q) digits[k++] = 0;
      if (k == null.size()) break;
    }
    out.injective = count;
  } else {
    if (n * d > 64) throw cap_error("intertwiner system too large");
    // count full-rank solutions by inclusion-exclusion over left kernels
    Int inj = 0;
    for (int k = 0; k <= d; ++k) {
      Int sign_weight = pow_int(Int(f.q), static_cast<unsigned long>(binom2(k)));
      if (k % 2) sign_weight = -sign_weight;
      for (const FqMat& w : all_subspaces(f, d, k)) {
        FqMat extra;
        for (const auto& wrow : w)
          for (int j = 0; j < n; ++j) {
            std::vector<int> e(n * d, 0);
            for (int c = 0; c < d; ++c) e[c * n + j] = wrow[c];
            extra.push_back(std::move(e));
          }
        inj += sign_weight * pow_int(Int(f.q), static_cast<unsigned long>(solution_dim(extra)));
      }
    }
    out.injective = inj;
  }
  return out;
}

InterExpectation expected_inter(const BGraph& hgraph, const Rep& rep, int n, bool exhaustive,
                                long long samples, unsigned long long seed, long long cap) {
  const Fq& f = rep.field;
  int letters = hgraph.letters();
  if (letters == 0) throw precondition_error("ambient alphabet required");
  std::vector<FqMat> beta = rep.images;
  InterExpectation out;
  if (exhaustive) {
    std::vector<FqMat> gl = all_invertible_matrices(f, n);
    Int count = 1;
    for (int l = 0; l < letters; ++l) {
      count *= static_cast<long long>(gl.size());
      if (count > Int(cap)) throw cap_error("exhaustive homomorphism budget exceeded");
    }
    Int tsum = 0, isum = 0;
    std::vector<size_t> idx(letters, 0);
    while (true) {
      std::vector<FqMat> alpha;
      alpha.reserve(letters);
      for (int l = 0; l < letters; ++l) alpha.push_back(gl[idx[l]]);
      InterCount ic = inter_count(f, alpha, rep.basis, beta, rep.d);
      tsum += ic.total;
      isum += ic.injective;
      int l = 0;
      while (l < letters && ++idx[l] == gl.size()) idx[l++] = 0;
      if (l == letters) break;
    }
    out.total = Rational(tsum, count);
    out.injective = Rational(isum, count);
    out.exact = true;
    out.samples = static_cast<long long>(count);
  } else {
    if (samples < 1) throw precondition_error("sample count required");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> entry(0, f.q - 1);
    auto random_invertible = [&]() {
      while (true) {
        FqMat m(n, std::vector<int>(n));
        for (auto& row : m)
          for (auto& x : row) x = entry(rng);
        if (fq_invertible(f, m)) return m;
      }
    };
    Int tsum = 0, isum = 0;
    for (long long s = 0; s < samples; ++s) {
      std::vector<FqMat> alpha;
      alpha.reserve(letters);
      for (int l = 0; l < letters; ++l) alpha.push_back(random_invertible());
      InterCount ic = inter_count(f, alpha, rep.basis, beta, rep.d);
      tsum += ic.total;
      isum += ic.injective;
    }
    out.total = Rational(tsum, Int(samples));
    out.injective = Rational(isum, Int(samples));
    out.exact = false;
    out.samples = samples;
  }
  return out;
}

Rational grassmann_fixed_bruteforce(const BGraph& hgraph, int n, const Fq& f, int d,
                                    long long cap) {
  if (d < 0 || d > n) throw precondition_error("subspace dimension out of range");
  int letters = hgraph.letters();
  if (letters == 0) throw precondition_error("ambient alphabet required");
  int base = hgraph.basepoint >= 0 ? hgraph.basepoint : 0;
  std::vector<Word> basis = free_basis(hgraph, base);
  int r = static_cast<int>(basis.size());

  std::vector<FqMat> gln = all_invertible_matrices(f, n);
  std::vector<FqMat> gld = d > 0 ? all_invertible_matrices(f, d) : std::vector<FqMat>{FqMat{}};
  Int alpha_count = 1;
  for (int l = 0; l < letters; ++l) alpha_count *= static_cast<long long>(gln.size());
  Int beta_count = 1;
  for (int k = 0; k < r; ++k) beta_count *= static_cast<long long>(gld.size());
  if (alpha_count * beta_count > Int(cap)) throw cap_error("enumeration budget exceeded");
  std::vector<FqMat> subs = all_subspaces(f, n, d);

  Int inj_sum = 0;       // path 1 numerator
  Int invariant_sum = 0;  // path 2 numerator
  std::vector<size_t> aidx(letters, 0);
  while (true) {
    std::vector<FqMat> alpha;
    alpha.reserve(letters);
    for (int l = 0; l < letters; ++l) alpha.push_back(gln[aidx[l]]);
    std::vector<FqMat> invs = invert_all(f, alpha);
    std::vector<FqMat> amats;
    amats.reserve(r);
    for (const Word& h : basis) amats.push_back(eval_on(f, alpha, invs, h, n));

    for (const FqMat& w : subs) {
      bool invariant = true;
      for (const FqMat& a : amats) {
        FqMat stacked = w;
        FqMat wa = fq_mul(f, w, a);
        for (auto& row : wa) stacked.push_back(std::move(row));
        if (fq_rank(f, stacked) != d) {
          invariant = false;
          break;
        }
      }
      if (invariant) ++invariant_sum;
    }

    std::vector<size_t> bidx(r, 0);
    while (true) {
      std::vector<FqMat> beta;
      beta.reserve(r);
      for (int k = 0; k < r; ++k) beta.push_back(gld[bidx[k]]);
      inj_sum += inter_count(f, alpha, basis, beta, d).injective;
      int k = 0;
      while (k < r && ++bidx[k] == gld.size()) bidx[k++] = 0;
      if (k == r) break;
    }

    int l = 0;
    while (l < letters && ++aidx[l] == gln.size()) aidx[l++] = 0;
    if (l == letters) break;
  }

  Int gld_order = static_cast<long long>(gld.size());
  // each invariant subspace contributes |GL_d| injective intertwiners, one per
  // choice of basis, summed over all beta
  Rational path1 = Rational(inj_sum, alpha_count * gld_order);
  Rational path2 = Rational(invariant_sum, alpha_count);
  if (path1 != path2)
    throw invariant_violation("invariant-subspace counts disagree between the two routes");
  return path2;
}

// --- probes -----------------------------------------------------------------------

namespace {

// Stabilized check that the unit monomials stay independent modulo the module.
bool units_independent(const FqSubmodule& n, int d, int max_radius) {
  std::set<Monomial> units;
  for (int i = 0; i < d; ++i) units.insert(Monomial{i, Word{}});
  int base = 1;
  for (const ModuleElement& g : n.gens)
    if (!g.is_zero()) base = std::max(base, element_height(g) + 1);
  int prev = -1;
  for (int radius = base; radius <= base + max_radius; ++radius) {
    std::map<Monomial, ModuleElement> rows = translate_table(n, radius);
    int dim = span_dim_in(n.field, rows, units);
    if (prev == dim) return dim == 0;
    prev = dim;
  }
  throw cap_error("efficiency check did not stabilize");
}

}  // namespace

SbarpiQReport sbarpi_q_probe(const BGraph& hgraph, int d, const Fq& f, int codim_cap,
                             int max_radius, long long candidate_cap) {
  if (hgraph.basepoint < 0 || !hgraph.connected())
    throw precondition_error("connected basepointed subgroup graph required");
  if (d < 1) throw precondition_error("d must be positive");
  std::vector<Word> basis = free_basis(hgraph, hgraph.basepoint);
  int rank_h = static_cast<int>(basis.size());
  if (rank_h == 0) throw precondition_error("trivial subgroup");

  Rep rep;
  rep.field = f;
  rep.d = d;
  rep.basis = basis;
  rep.images.assign(rank_h, fq_identity(d));
  FqSubmodule m0 = m_beta_ambient(rep, hgraph.alphabet);

  std::set<Word> prefixes;
  for (const Word& w : basis)
    for (int k = 0; k <= w.length(); ++k) {
      Word p;
      p.syl.assign(w.syl.begin(), w.syl.begin() + k);
      prefixes.insert(std::move(p));
    }
  std::vector<Monomial> support;
  for (int i = 0; i < d; ++i)
    for (const Word& w : prefixes) support.push_back(Monomial{i, w});
  Int candidates = pow_int(Int(f.q), static_cast<unsigned long>(support.size()));
  if (candidates > Int(candidate_cap)) throw cap_error("candidate support too large");

  SbarpiQReport report;
  auto consider = [&](const FqSubmodule& n, std::optional<long long> known_rank) {
    ++report.inspected;
    try {
      if (!units_independent(n, d, max_radius)) return;
    } catch (const cap_error&) {
      ++report.skipped;
      return;
    }
    long long rk;
    if (known_rank) {
      rk = *known_rank;
    } else {
      try {
        rk = module_rank(n, codim_cap, max_radius);
      } catch (const cap_error&) {
        ++report.skipped;
        return;
      }
    }
    ++report.certified;
    if (rank_h > 1 && rk < 2LL * d) {
      report.gap_ok = false;
      throw invariant_violation("efficient overmodule with rank below 2d");
    }
    Rational value = Rational(rk - d, d);
    if (!report.found || value < report.upper_bound) {
      report.found = true;
      report.upper_bound = value;
      report.min_rank = rk;
    }
  };

  consider(m0, std::nullopt);

  std::vector<int> digits(support.size(), 0);
  while (true) {
    size_t k = 0;
    while (k < support.size() && ++digits[k] == f.q) digits[k++] = 0;
    if (k == support.size()) break;
    ModuleElement x;
    for (size_t j = 0; j < support.size(); ++j)
      if (digits[j] != 0) x.c[support[j]] = digits[j];
    if (x.c.rbegin()->second != 1) continue;  // one representative per scalar line
    FqSubmodule n = m0;
    n.gens.push_back(std::move(x));
    consider(n, std::nullopt);
  }

  // power-structure certificate for a proper-power cyclic subgroup
  if (rank_h == 1 && d == 1) {
    const Word& w0 = basis[0];
    for (int per = 1; per < w0.length(); ++per) {
      if (w0.length() % per != 0) continue;
      Word u;
      u.syl.assign(w0.syl.begin(), w0.syl.begin() + per);
      int k = w0.length() / per;
      if (k < 2 || !(u.pow(k) == w0)) continue;
      for (int mu = 1; mu < f.q; ++mu) {
        if (f.pow(mu, k) != 1) continue;  // beta is the identity scalar
        FqSubmodule n;
        n.field = f;
        n.m = 1;
        n.ring = hgraph.alphabet;
        ModuleElement g = me_monomial(0, u);
        me_add_scaled(f, g, f.neg(mu), me_unit(0));
        n.gens.push_back(std::move(g));
        consider(n, 1);
      }
      break;
    }
  }
  return report;
}

KhncReport khnc_probe(const BGraph& hgraph, const FqSubmodule& m, int cap, int max_radius) {
  if (hgraph.basepoint < 0 || !hgraph.connected())
    throw precondition_error("connected basepointed subgroup graph required");
  if (!(m.ring == hgraph.alphabet))
    throw precondition_error("module ring must match the ambient alphabet");
  std::vector<Word> basis = free_basis(hgraph, hgraph.basepoint);
  long long rank_h = static_cast<long long>(basis.size());
  int d = m.m;
  const Fq& f = m.field;

  Transversal t = codim_and_transversal(m, cap, max_radius);
  long long rank_m = static_cast<long long>(lewin_basis(m, t).size());
  int c = t.codim;
  std::map<Monomial, int> index;
  for (int k = 0; k < c; ++k) index[t.elements[k]] = k;
  auto as_vector = [&](const ModuleElement& e) {
    std::vector<int> v(c, 0);
    for (const auto& [mono, coeff] : e.c) {
      auto it = index.find(mono);
      if (it == index.end())
        throw invariant_violation("quotient representative leaves the transversal");
      v[it->second] = coeff;
    }
    return v;
  };

  // right action of each ambient letter on the quotient, in transversal basis
  std::vector<FqMat> rho, rho_inv;
  for (int l = 0; l < m.ring.size(); ++l) {
    Word b;
    b.syl = {{l, 1}};
    FqMat mat;
    for (int k = 0; k < c; ++k) {
      ModuleElement shifted = me_monomial(t.elements[k].i, t.elements[k].w * b);
      mat.push_back(as_vector(reduce_full(f, shifted, t.pivots)));
    }
    auto inv = fq_inverse(f, mat);
    if (!inv) throw invariant_violation("quotient letter action is not invertible");
    rho.push_back(std::move(mat));
    rho_inv.push_back(std::move(*inv));
  }
  auto word_action = [&](const Word& w) {
    FqMat a = fq_identity(c);
    for (const auto& [l, s] : w.syl) a = fq_mul(f, a, s > 0 ? rho[l] : rho_inv[l]);
    return a;
  };
  std::vector<FqMat> hacts;
  for (const Word& h : basis) {
    FqMat a = word_action(h);
    hacts.push_back(a);
    auto inv = fq_inverse(f, a);
    hacts.push_back(std::move(*inv));  // invertible: product of invertibles
  }

  // span of the H-orbit of the unit images = image of K[H]^d in the quotient
  FqMat span;  // echelon rows in F_q^c
  auto try_add = [&](std::vector<int> v) {
    for (const auto& row : span) {
      int lead = -1;
      for (int j = 0; j < c; ++j)
        if (row[j] != 0) {
          lead = j;
          break;
        }
      if (lead >= 0 && v[lead] != 0) {
        int factor = f.mul(v[lead], f.inv(row[lead]));
        for (int j = 0; j < c; ++j) v[j] = f.sub(v[j], f.mul(factor, row[j]));
      }
    }
    bool nonzero = false;
    for (int x : v) nonzero |= (x != 0);
    if (nonzero) span.push_back(v);
    return nonzero ? std::optional<std::vector<int>>(std::move(v)) : std::nullopt;
  };
  std::queue<std::vector<int>> work;
  for (int i = 0; i < d; ++i) {
    ModuleElement e = reduce_full(f, me_unit(i), t.pivots);
    if (auto added = try_add(as_vector(e))) work.push(*added);
  }
  while (!work.empty()) {
    std::vector<int> v = work.front();
    work.pop();
    for (const FqMat& a : hacts) {
      std::vector<int> nv(c, 0);
      for (int j = 0; j < c; ++j) {
        if (v[j] == 0) continue;
        for (int k = 0; k < c; ++k) nv[k] = f.add(nv[k], f.mul(v[j], a[j][k]));
      }
      if (auto added = try_add(std::move(nv))) work.push(*added);
    }
  }

  KhncReport out;
  out.codim_f = c;
  out.codim_h = static_cast<long long>(span.size());
  out.rank_m = rank_m;
  out.rank_mh = d + out.codim_h * (rank_h - 1);
  out.lhs = Rational(out.rank_mh - d, d);
  out.rhs = Rational(out.rank_m - d, d) * Rational(rank_h - 1);
  out.slack = out.rhs - out.lhs;
  return out;
}

}  // namespace stlab
