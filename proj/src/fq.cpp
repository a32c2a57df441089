#include "stlab/fq.hpp"

#include <algorithm>

#include "stlab/errors.hpp"

namespace stlab {

namespace {

bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace

Fq Fq::make(int q) {
  if (q < 2) throw precondition_error("field size must be at least 2");
  Fq f;
  f.q = q;
  for (int p = 2; p <= q; ++p) {
    if (!is_prime(p)) continue;
    if (p == q) {
      f.p = p;
      f.k = 1;
      return f;
    }
    if (p * p == q) {
      f.p = p;
      f.k = 2;
      // find a monic irreducible t^2 + c1 t + c0 over F_p
      for (int c1 = 0; c1 < p; ++c1)
        for (int c0 = 1; c0 < p; ++c0) {
          bool has_root = false;
          for (int t = 0; t < p; ++t)
            if ((t * t + c1 * t + c0) % p == 0) {
              has_root = true;
              break;
            }
          if (!has_root) {
            f.c0 = c0;
            f.c1 = c1;
            return f;
          }
        }
      throw invariant_violation("no irreducible quadratic found");
    }
  }
  throw precondition_error("field size must be p or p^2 with p prime");
}

int Fq::add(int a, int b) const {
  if (k == 1) return (a + b) % p;
  return (a % p + b % p) % p + ((a / p + b / p) % p) * p;
}

int Fq::neg(int a) const {
  if (k == 1) return (p - a % p) % p;
  return (p - a % p) % p + ((p - a / p % p) % p) * p;
}

int Fq::sub(int a, int b) const { return add(a, neg(b)); }

int Fq::mul(int a, int b) const {
  if (k == 1) return (a * b) % p;
  int a0 = a % p, a1 = a / p, b0 = b % p, b1 = b / p;
  // (a0 + a1 t)(b0 + b1 t), with t^2 = -c1 t - c0
  int hi = a1 * b1 % p;
  int mid = (a0 * b1 + a1 * b0) % p;
  int lo = a0 * b0 % p;
  int r0 = (lo + (p - c0) * hi) % p;
  int r1 = (mid + (p - c1) * hi) % p;
  return r0 + r1 * p;
}

int Fq::pow(int a, long long e) const {
  if (e < 0) {
    a = inv(a);
    e = -e;
  }
  int r = 1;
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

int Fq::inv(int a) const {
  if (a == 0) throw precondition_error("inverse of zero");
  return pow(a, q - 2);
}

FqMat fq_identity(int n) {
  FqMat m(n, std::vector<int>(n, 0));
  for (int i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

FqMat fq_zero(int rows, int cols) { return FqMat(rows, std::vector<int>(cols, 0)); }

FqMat fq_mul(const Fq& f, const FqMat& a, const FqMat& b) {
  int n = static_cast<int>(a.size());
  int m = static_cast<int>(b[0].size());
  int k = static_cast<int>(b.size());
  FqMat r = fq_zero(n, m);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < k; ++l) {
      if (a[i][l] == 0) continue;
      for (int j = 0; j < m; ++j) r[i][j] = f.add(r[i][j], f.mul(a[i][l], b[l][j]));
    }
  return r;
}

FqMat fq_add(const Fq& f, const FqMat& a, const FqMat& b) {
  FqMat r = a;
  for (size_t i = 0; i < r.size(); ++i)
    for (size_t j = 0; j < r[i].size(); ++j) r[i][j] = f.add(r[i][j], b[i][j]);
  return r;
}

FqMat fq_scale(const Fq& f, int s, const FqMat& a) {
  FqMat r = a;
  for (auto& row : r)
    for (auto& x : row) x = f.mul(s, x);
  return r;
}

namespace {

// Row echelon in place; returns pivot columns.
std::vector<int> echelonize(const Fq& f, FqMat& a) {
  std::vector<int> pivots;
  if (a.empty()) return pivots;
  int rows = static_cast<int>(a.size());
  int cols = static_cast<int>(a[0].size());
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int sel = -1;
    for (int i = r; i < rows; ++i)
      if (a[i][c] != 0) {
        sel = i;
        break;
      }
    if (sel < 0) continue;
    std::swap(a[r], a[sel]);
    int iv = f.inv(a[r][c]);
    for (int j = c; j < cols; ++j) a[r][j] = f.mul(iv, a[r][j]);
    for (int i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      int factor = a[i][c];
      for (int j = c; j < cols; ++j) a[i][j] = f.sub(a[i][j], f.mul(factor, a[r][j]));
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

int fq_rank(const Fq& f, FqMat a) { return static_cast<int>(echelonize(f, a).size()); }

std::optional<FqMat> fq_inverse(const Fq& f, const FqMat& a) {
  int n = static_cast<int>(a.size());
  FqMat aug = a;
  for (int i = 0; i < n; ++i) {
    aug[i].resize(2 * n, 0);
    aug[i][n + i] = 1;
  }
  std::vector<int> piv = echelonize(f, aug);
  // the identity block guarantees full row rank; invertible iff all pivots
  // land in the left half
  if (static_cast<int>(piv.size()) < n || piv[n - 1] != n - 1) return std::nullopt;
  FqMat inv(n, std::vector<int>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv[i][j] = aug[i][n + j];
  return inv;
}

bool fq_invertible(const Fq& f, const FqMat& a) {
  return fq_rank(f, a) == static_cast<int>(a.size());
}

std::vector<std::vector<int>> fq_nullspace(const Fq& f, FqMat a) {
  if (a.empty()) return {};
  int cols = static_cast<int>(a[0].size());
  std::vector<int> piv = echelonize(f, a);
  std::vector<char> is_pivot(cols, 0);
  for (int c : piv) is_pivot[c] = 1;
  std::vector<std::vector<int>> basis;
  for (int c = 0; c < cols; ++c) {
    if (is_pivot[c]) continue;
    std::vector<int> v(cols, 0);
    v[c] = 1;
    for (size_t r = 0; r < piv.size(); ++r) v[piv[r]] = f.neg(a[r][c]);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::vector<FqMat> all_invertible_matrices(const Fq& f, int n, long long cap) {
  long long total = 1;
  for (int i = 0; i < n * n; ++i) {
    total *= f.q;
    if (total > cap) throw cap_error("matrix enumeration cap exceeded");
  }
  std::vector<FqMat> out;
  std::vector<int> digits(n * n, 0);
  while (true) {
    FqMat m(n, std::vector<int>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m[i][j] = digits[i * n + j];
    if (fq_invertible(f, m)) out.push_back(std::move(m));
    int i = 0;
    while (i < n * n && ++digits[i] == f.q) digits[i++] = 0;
    if (i == n * n) break;
  }
  return out;
}

Int gl_order(const Fq& f, int n) {
  Int order = 1;
  Int qn = pow_int(Int(f.q), static_cast<unsigned long>(n));
  for (int i = 0; i < n; ++i) order *= qn - pow_int(Int(f.q), static_cast<unsigned long>(i));
  return order;
}

std::vector<FqMat> all_subspaces(const Fq& f, int n, int d) {
  if (d < 0 || d > n) return {};
  if (d == 0) return {FqMat{}};
  // enumerate all d-tuples of vectors, keep rank-d ones, dedup by RREF
  std::vector<FqMat> out;
  std::vector<std::vector<int>> seen;  // flattened RREFs
  long long vecs = 1;
  for (int i = 0; i < n; ++i) vecs *= f.q;
  std::vector<long long> idx(d, 0);
  auto decode = [&](long long code) {
    std::vector<int> v(n);
    for (int i = 0; i < n; ++i) {
      v[i] = static_cast<int>(code % f.q);
      code /= f.q;
    }
    return v;
  };
  while (true) {
    FqMat m;
    for (int i = 0; i < d; ++i) m.push_back(decode(idx[i]));
    FqMat ech = m;
    if (static_cast<int>(echelonize(f, ech).size()) == d) {
      std::vector<int> flat;
      for (const auto& row : ech) flat.insert(flat.end(), row.begin(), row.end());
      if (std::find(seen.begin(), seen.end(), flat) == seen.end()) {
        seen.push_back(flat);
        out.push_back(ech);
      }
    }
    int i = 0;
    while (i < d && ++idx[i] == vecs) idx[i++] = 0;
    if (i == d) break;
  }
  return out;
}

Rational gaussian_binomial(int n, int d, int q) {
  if (d < 0 || d > n) return Rational(0);
  Rational r(1);
  for (int i = 0; i < d; ++i) {
    Int top = pow_int(Int(q), static_cast<unsigned long>(n - i)) - 1;
    Int bot = pow_int(Int(q), static_cast<unsigned long>(i + 1)) - 1;
    r *= Rational(top, bot);
  }
  return r;
}

}  // namespace stlab
