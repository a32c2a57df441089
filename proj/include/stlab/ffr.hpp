#pragma once

#include <utility>
#include <vector>

#include "stlab/rational.hpp"

namespace stlab {

// Dense univariate polynomial over Q; c[i] is the coefficient of n^i.
struct QPoly {
  std::vector<Rational> c;

  QPoly() = default;
  explicit QPoly(std::vector<Rational> coeffs) : c(std::move(coeffs)) { trim(); }
  static QPoly constant(const Rational& r);
  static QPoly variable();

  void trim();
  int degree() const { return static_cast<int>(c.size()) - 1; }  // -1 for zero
  bool is_zero() const { return c.empty(); }
  Rational lead() const;
  Rational eval(const Rational& x) const;
  bool operator==(const QPoly&) const = default;
};

QPoly operator+(const QPoly& a, const QPoly& b);
QPoly operator-(const QPoly& a, const QPoly& b);
QPoly operator*(const QPoly& a, const QPoly& b);
QPoly operator*(const Rational& s, const QPoly& a);
// (quotient, remainder) with deg(remainder) < deg(b); b nonzero.
std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b);
QPoly poly_gcd(QPoly a, QPoly b);  // monic, gcd(0,0) = 0
QPoly falling_factorial_poly(int k);  // n(n-1)...(n-k+1), k >= 0

// A reduced fraction of polynomials: parts coprime, denominator monic.
struct PolyFrac {
  QPoly num, den;

  PolyFrac() : den(QPoly::constant(1)) {}
  PolyFrac(QPoly n, QPoly d);  // normalizes; d must be nonzero
  static PolyFrac from_rational(const Rational& r);

  bool is_zero() const { return num.is_zero(); }
  Rational eval(const Rational& x) const;  // den(x) must be nonzero
  // Both parts scaled to integer coefficients with overall content 1 (the
  // denominator keeps a positive leading coefficient).
  std::pair<std::vector<Int>, std::vector<Int>> integer_pair() const;
  bool operator==(const PolyFrac&) const = default;
};

PolyFrac operator+(const PolyFrac& a, const PolyFrac& b);
PolyFrac operator-(const PolyFrac& a, const PolyFrac& b);
PolyFrac operator*(const PolyFrac& a, const PolyFrac& b);
PolyFrac operator/(const PolyFrac& a, const PolyFrac& b);

// (n)_k = n(n-1)...(n-k+1) at a concrete n.
Rational falling_factorial(const Int& n, int k);

// One term: coeff * prod (n)_k over num / prod (n)_k over den, with num and
// den kept as sorted multisets of indices k >= 1 with common factors canceled.
struct FFTerm {
  Rational coeff;
  std::vector<int> num, den;
  bool operator==(const FFTerm&) const = default;
};

// A formal Q-linear combination of quotients of falling-factorial products.
// Terms are kept merged by key and sorted, so equal expressions have equal
// term lists; cross-term cancellation is visible only in canonical().
class FallingFactorialRational {
 public:
  FallingFactorialRational() = default;  // zero
  static FallingFactorialRational constant(const Rational& r);
  static FallingFactorialRational term(const Rational& coeff, std::vector<int> num,
                                       std::vector<int> den = {});

  const std::vector<FFTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  FallingFactorialRational& operator+=(const FallingFactorialRational& o);
  friend FallingFactorialRational operator+(FallingFactorialRational a,
                                            const FallingFactorialRational& b) {
    a += b;
    return a;
  }
  friend FallingFactorialRational operator*(const FallingFactorialRational& a,
                                            const FallingFactorialRational& b);
  friend FallingFactorialRational operator*(const Rational& s,
                                            const FallingFactorialRational& a);

  // Term-by-term exact evaluation; every denominator factor must be nonzero.
  Rational evaluate(const Int& n) const;
  // Reduced rational-function form (expands the falling factorials).
  PolyFrac canonical() const;

  bool operator==(const FallingFactorialRational&) const = default;

 private:
  void add_term(FFTerm t);
  std::vector<FFTerm> terms_;
};

// (degree, leading coefficient) of the reduced rational function; the
// expression must be nonzero.
std::pair<long long, Rational> asymptotics(const FallingFactorialRational& f);

}  // namespace stlab
