#pragma once

#include <optional>
#include <vector>

#include "stlab/rational.hpp"

namespace stlab {

// The finite field with q = p^k elements, k <= 2. Elements are encoded as
// integers 0..q-1; for k = 2 the element a0 + a1*t is encoded as a0 + a1*p,
// where t is a root of the stored irreducible t^2 + c1*t + c0.
struct Fq {
  int p = 2, k = 1, q = 2;
  int c0 = 0, c1 = 0;

  static Fq make(int q);

  int add(int a, int b) const;
  int sub(int a, int b) const;
  int neg(int a) const;
  int mul(int a, int b) const;
  int inv(int a) const;  // a != 0
  int pow(int a, long long e) const;
};

using FqMat = std::vector<std::vector<int>>;

FqMat fq_identity(int n);
FqMat fq_zero(int rows, int cols);
FqMat fq_mul(const Fq& f, const FqMat& a, const FqMat& b);
FqMat fq_add(const Fq& f, const FqMat& a, const FqMat& b);
FqMat fq_scale(const Fq& f, int s, const FqMat& a);
int fq_rank(const Fq& f, FqMat a);
std::optional<FqMat> fq_inverse(const Fq& f, const FqMat& a);
bool fq_invertible(const Fq& f, const FqMat& a);
// Basis of { x : a x = 0 } (x a column vector).
std::vector<std::vector<int>> fq_nullspace(const Fq& f, FqMat a);

// All invertible n x n matrices (enumerates q^(n^2) candidates; capped).
std::vector<FqMat> all_invertible_matrices(const Fq& f, int n, long long cap = 2000000);
Int gl_order(const Fq& f, int n);

// Canonical (reduced row echelon) bases of all d-dimensional subspaces of
// Fq^n, viewed as row spaces.
std::vector<FqMat> all_subspaces(const Fq& f, int n, int d);
Rational gaussian_binomial(int n, int d, int q);

}  // namespace stlab
