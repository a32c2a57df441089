#include "stlab/ffr.hpp"

#include <algorithm>
#include <tuple>

#include "stlab/errors.hpp"

namespace stlab {

// --- QPoly -------------------------------------------------------------------

QPoly QPoly::constant(const Rational& r) {
  QPoly p;
  if (r != 0) p.c = {r};
  return p;
}

QPoly QPoly::variable() {
  QPoly p;
  p.c = {Rational(0), Rational(1)};
  return p;
}

void QPoly::trim() {
  while (!c.empty() && c.back() == 0) c.pop_back();
}

Rational QPoly::lead() const {
  if (c.empty()) return Rational(0);
  return c.back();
}

Rational QPoly::eval(const Rational& x) const {
  Rational r(0);
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
  return r;
}

QPoly operator+(const QPoly& a, const QPoly& b) {
  QPoly r;
  r.c.resize(std::max(a.c.size(), b.c.size()), Rational(0));
  for (size_t i = 0; i < a.c.size(); ++i) r.c[i] += a.c[i];
  for (size_t i = 0; i < b.c.size(); ++i) r.c[i] += b.c[i];
  r.trim();
  return r;
}

QPoly operator-(const QPoly& a, const QPoly& b) {
  QPoly r;
  r.c.resize(std::max(a.c.size(), b.c.size()), Rational(0));
  for (size_t i = 0; i < a.c.size(); ++i) r.c[i] += a.c[i];
  for (size_t i = 0; i < b.c.size(); ++i) r.c[i] -= b.c[i];
  r.trim();
  return r;
}

QPoly operator*(const QPoly& a, const QPoly& b) {
  QPoly r;
  if (a.is_zero() || b.is_zero()) return r;
  r.c.assign(a.c.size() + b.c.size() - 1, Rational(0));
  for (size_t i = 0; i < a.c.size(); ++i)
    for (size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
  r.trim();
  return r;
}

QPoly operator*(const Rational& s, const QPoly& a) {
  QPoly r = a;
  for (auto& x : r.c) x *= s;
  r.trim();
  return r;
}

std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b) {
  if (b.is_zero()) throw precondition_error("polynomial division by zero");
  QPoly q, r = a;
  if (a.degree() < b.degree()) return {q, r};
  q.c.assign(a.degree() - b.degree() + 1, Rational(0));
  while (!r.is_zero() && r.degree() >= b.degree()) {
    int shift = r.degree() - b.degree();
    Rational f = r.lead() / b.lead();
    q.c[shift] += f;
    for (size_t i = 0; i < b.c.size(); ++i) r.c[i + shift] -= f * b.c[i];
    r.trim();
  }
  q.trim();
  return {q, r};
}

QPoly poly_gcd(QPoly a, QPoly b) {
  while (!b.is_zero()) {
    QPoly r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.is_zero()) a = (Rational(1) / a.lead()) * a;  // monic
  return a;
}

QPoly falling_factorial_poly(int k) {
  if (k < 0) throw precondition_error("falling factorial index must be >= 0");
  QPoly p = QPoly::constant(1);
  for (int i = 0; i < k; ++i)
    p = p * (QPoly::variable() - QPoly::constant(Rational(i)));
  return p;
}

// --- PolyFrac ----------------------------------------------------------------

PolyFrac::PolyFrac(QPoly n, QPoly d) : num(std::move(n)), den(std::move(d)) {
  if (den.is_zero()) throw precondition_error("zero denominator");
  if (num.is_zero()) {
    den = QPoly::constant(1);
    return;
  }
  QPoly g = poly_gcd(num, den);
  if (g.degree() > 0) {
    num = divmod(num, g).first;
    den = divmod(den, g).first;
  }
  Rational l = den.lead();
  num = (Rational(1) / l) * num;
  den = (Rational(1) / l) * den;
}

PolyFrac PolyFrac::from_rational(const Rational& r) {
  return PolyFrac(QPoly::constant(r), QPoly::constant(1));
}

Rational PolyFrac::eval(const Rational& x) const {
  Rational d = den.eval(x);
  if (d == 0) throw precondition_error("pole of rational function");
  return num.eval(x) / d;
}

std::pair<std::vector<Int>, std::vector<Int>> PolyFrac::integer_pair() const {
  Int l(1);
  for (const auto& x : num.c) l = boost::multiprecision::lcm(l, denominator(x));
  for (const auto& x : den.c) l = boost::multiprecision::lcm(l, denominator(x));
  std::vector<Int> ni, di;
  Int g(0);
  auto scale = [&](const QPoly& p, std::vector<Int>& out) {
    for (const auto& x : p.c) {
      Int v = numerator(x * Rational(l));
      out.push_back(v);
      g = boost::multiprecision::gcd(g, v);
    }
  };
  scale(num, ni);
  scale(den, di);
  if (g == 0) g = 1;
  for (auto& v : ni) v /= g;
  for (auto& v : di) v /= g;
  return {ni, di};
}

PolyFrac operator+(const PolyFrac& a, const PolyFrac& b) {
  return PolyFrac(a.num * b.den + b.num * a.den, a.den * b.den);
}

PolyFrac operator-(const PolyFrac& a, const PolyFrac& b) {
  return PolyFrac(a.num * b.den - b.num * a.den, a.den * b.den);
}

PolyFrac operator*(const PolyFrac& a, const PolyFrac& b) {
  return PolyFrac(a.num * b.num, a.den * b.den);
}

PolyFrac operator/(const PolyFrac& a, const PolyFrac& b) {
  if (b.is_zero()) throw precondition_error("division by zero rational function");
  return PolyFrac(a.num * b.den, a.den * b.num);
}

// --- FallingFactorialRational --------------------------------------------------

Rational falling_factorial(const Int& n, int k) {
  Rational r(1);
  for (int i = 0; i < k; ++i) r *= Rational(n - i);
  return r;
}

namespace {

// Cancels shared indices and sorts both multisets.
void normalize_term(FFTerm& t) {
  std::sort(t.num.begin(), t.num.end());
  std::sort(t.den.begin(), t.den.end());
  std::vector<int> n2, d2;
  size_t i = 0, j = 0;
  while (i < t.num.size() && j < t.den.size()) {
    if (t.num[i] == t.den[j]) {
      ++i, ++j;
    } else if (t.num[i] < t.den[j]) {
      n2.push_back(t.num[i++]);
    } else {
      d2.push_back(t.den[j++]);
    }
  }
  n2.insert(n2.end(), t.num.begin() + i, t.num.end());
  d2.insert(d2.end(), t.den.begin() + j, t.den.end());
  t.num = std::move(n2);
  t.den = std::move(d2);
}

bool key_less(const FFTerm& a, const FFTerm& b) {
  return std::tie(a.num, a.den) < std::tie(b.num, b.den);
}

}  // namespace

FallingFactorialRational FallingFactorialRational::constant(const Rational& r) {
  return term(r, {});
}

FallingFactorialRational FallingFactorialRational::term(const Rational& coeff,
                                                        std::vector<int> num,
                                                        std::vector<int> den) {
  for (int k : num)
    if (k < 1) throw precondition_error("falling factorial index must be >= 1");
  for (int k : den)
    if (k < 1) throw precondition_error("falling factorial index must be >= 1");
  FallingFactorialRational f;
  f.add_term(FFTerm{coeff, std::move(num), std::move(den)});
  return f;
}

void FallingFactorialRational::add_term(FFTerm t) {
  if (t.coeff == 0) return;
  normalize_term(t);
  auto it = std::lower_bound(terms_.begin(), terms_.end(), t, key_less);
  if (it != terms_.end() && it->num == t.num && it->den == t.den) {
    it->coeff += t.coeff;
    if (it->coeff == 0) terms_.erase(it);
  } else {
    terms_.insert(it, std::move(t));
  }
}

FallingFactorialRational& FallingFactorialRational::operator+=(
    const FallingFactorialRational& o) {
  for (const auto& t : o.terms_) add_term(t);
  return *this;
}

FallingFactorialRational operator*(const FallingFactorialRational& a,
                                   const FallingFactorialRational& b) {
  FallingFactorialRational r;
  for (const auto& ta : a.terms_)
    for (const auto& tb : b.terms_) {
      FFTerm t;
      t.coeff = ta.coeff * tb.coeff;
      t.num = ta.num;
      t.num.insert(t.num.end(), tb.num.begin(), tb.num.end());
      t.den = ta.den;
      t.den.insert(t.den.end(), tb.den.begin(), tb.den.end());
      r.add_term(std::move(t));
    }
  return r;
}

FallingFactorialRational operator*(const Rational& s, const FallingFactorialRational& a) {
  FallingFactorialRational r;
  for (const auto& t : a.terms_) r.add_term(FFTerm{s * t.coeff, t.num, t.den});
  return r;
}

Rational FallingFactorialRational::evaluate(const Int& n) const {
  Rational r(0);
  for (const auto& t : terms_) {
    Rational v = t.coeff;
    for (int k : t.num) v *= falling_factorial(n, k);
    for (int k : t.den) {
      Rational d = falling_factorial(n, k);
      if (d == 0) throw precondition_error("evaluation at a vanishing denominator factor");
      v /= d;
    }
    r += v;
  }
  return r;
}

PolyFrac FallingFactorialRational::canonical() const {
  PolyFrac sum;
  for (const auto& t : terms_) {
    QPoly n = QPoly::constant(t.coeff);
    for (int k : t.num) n = n * falling_factorial_poly(k);
    QPoly d = QPoly::constant(1);
    for (int k : t.den) d = d * falling_factorial_poly(k);
    sum = sum + PolyFrac(std::move(n), std::move(d));
  }
  return sum;
}

std::pair<long long, Rational> asymptotics(const FallingFactorialRational& f) {
  PolyFrac c = f.canonical();
  if (c.is_zero()) throw precondition_error("asymptotics of the zero expression");
  long long deg = c.num.degree() - c.den.degree();
  return {deg, c.num.lead() / c.den.lead()};
}

}  // namespace stlab
