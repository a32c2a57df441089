#include "doctest.h"

#include <random>

#include "stlab/errors.hpp"
#include "stlab/ffr.hpp"

using namespace stlab;

TEST_CASE("polynomial arithmetic and gcd") {
  QPoly n = QPoly::variable();
  QPoly p = n * n - QPoly::constant(1);           // n^2 - 1
  QPoly q = n - QPoly::constant(1);               // n - 1
  CHECK(divmod(p, q).first == n + QPoly::constant(1));
  CHECK(divmod(p, q).second.is_zero());
  CHECK(poly_gcd(p, q) == q);
  // gcd is monic even with non-monic inputs
  QPoly g = poly_gcd(Rational(6) * q, Rational(4) * q * q);
  CHECK(g == q);
  CHECK(falling_factorial_poly(0) == QPoly::constant(1));
  CHECK(falling_factorial_poly(2) == n * n - n);
  CHECK(falling_factorial_poly(3).eval(Rational(7)) == 7 * 6 * 5);
}

TEST_CASE("polyfrac reduction") {
  QPoly n = QPoly::variable();
  PolyFrac f(n * n - QPoly::constant(1), n - QPoly::constant(1));
  CHECK(f == PolyFrac(n + QPoly::constant(1), QPoly::constant(1)));
  // denominator normalized monic
  PolyFrac h(QPoly::constant(1), Rational(2) * n);
  CHECK(h.den == n);
  CHECK(h.num == QPoly::constant(make_rational(1, 2)));
  auto [ni, di] = h.integer_pair();
  CHECK(ni == std::vector<Int>{Int(1)});
  CHECK(di == std::vector<Int>{Int(0), Int(2)});
  PolyFrac s = f + h;
  CHECK(s.eval(Rational(5)) == Rational(6) + make_rational(1, 10));
  CHECK((f * h).eval(Rational(5)) == make_rational(6, 10));
  CHECK((f / f) == PolyFrac::from_rational(Rational(1)));
}

TEST_CASE("falling factorial values") {
  CHECK(falling_factorial(Int(5), 0) == 1);
  CHECK(falling_factorial(Int(5), 3) == 60);
  CHECK(falling_factorial(Int(2), 4) == 0);
}

TEST_CASE("term normalization and arithmetic") {
  auto f = FallingFactorialRational::term(Rational(1), {2, 1}, {1});
  // (n)_1 cancels: a single term (n)_2
  REQUIRE(f.terms().size() == 1);
  CHECK(f.terms()[0].num == std::vector<int>{2});
  CHECK(f.terms()[0].den.empty());

  auto a = FallingFactorialRational::term(Rational(2), {3});
  auto b = FallingFactorialRational::term(Rational(-2), {3});
  CHECK((a + b).is_zero());

  auto c = FallingFactorialRational::term(Rational(1), {}, {1});
  auto prod = a * c;  // 2 (n)_3 / (n)_1
  CHECK(prod.evaluate(Int(5)) == Rational(2 * 60) / 5);
}

TEST_CASE("canonical form of (n)_2 / ((n)_1 (n)_1)") {
  auto f = FallingFactorialRational::term(Rational(1), {2}, {1, 1});
  PolyFrac c = f.canonical();
  QPoly n = QPoly::variable();
  CHECK(c == PolyFrac(n - QPoly::constant(1), n));
  auto [deg, lead] = asymptotics(f);
  CHECK(deg == 0);
  CHECK(lead == 1);
}

TEST_CASE("asymptotics and zero expression") {
  auto f = FallingFactorialRational::term(make_rational(3, 2), {4}, {1});
  auto [deg, lead] = asymptotics(f);
  CHECK(deg == 3);
  CHECK(lead == make_rational(3, 2));
  CHECK_THROWS_AS(asymptotics(FallingFactorialRational()), precondition_error);
}

TEST_CASE("canonical form matches term evaluation on consecutive integers") {
  std::mt19937_64 rng(97);
  for (int trial = 0; trial < 10; ++trial) {
    FallingFactorialRational f;
    int nterms = 1 + static_cast<int>(rng() % 4);
    for (int t = 0; t < nterms; ++t) {
      std::vector<int> num, den;
      for (int i = 0, k = static_cast<int>(rng() % 3); i < k; ++i)
        num.push_back(1 + static_cast<int>(rng() % 4));
      for (int i = 0, k = static_cast<int>(rng() % 3); i < k; ++i)
        den.push_back(1 + static_cast<int>(rng() % 4));
      Rational coeff = Rational(static_cast<int>(rng() % 9) - 4) / Rational(1 + static_cast<int>(rng() % 5));
      f += FallingFactorialRational::term(coeff, num, den);
    }
    PolyFrac c = f.canonical();
    for (Int n = 5; n < 15; ++n)
      CHECK(c.eval(Rational(n)) == f.evaluate(n));
  }
}

TEST_CASE("cross-term cancellation appears in the canonical form") {
  // (n)_2/(n)_1 + (n)_1 = (n-1) + n = 2n - 1
  auto f = FallingFactorialRational::term(Rational(1), {2}, {1}) +
           FallingFactorialRational::term(Rational(1), {1});
  QPoly n = QPoly::variable();
  CHECK(f.canonical() == PolyFrac(Rational(2) * n - QPoly::constant(1), QPoly::constant(1)));
  CHECK(f.terms().size() == 2);
}
