#include "doctest.h"

#include <string>
#include <vector>

#include "stlab/action.hpp"
#include "stlab/bgraph.hpp"
#include "stlab/errors.hpp"
#include "stlab/invariants.hpp"
#include "stlab/wordmeasure.hpp"

using namespace stlab;

namespace {

const Alphabet AXY = Alphabet::of("xy");

BGraph sub(const std::vector<std::string>& words) { return fold_strings(words, AXY); }

}  // namespace

TEST_CASE("minimal quotient rank") {
  PibarResult full = pibar_exact(sub({"x", "y"}));
  CHECK(full.value == 2);
  REQUIRE(full.crit.size() == 1);
  CHECK(full.crit[0].nv == 1);
  CHECK(full.crit[0].edge_count() == 2);

  CHECK(pibar_exact(sub({"xyx", "yxx"})).value == 2);

  // finite-index subgroups only map onto full-rank quotients
  CHECK(pibar_exact(sub({"y", "xx", "xyX"})).value == 2);
  CHECK(pibar_exact(sub({"yy", "xx", "xy"})).value == 2);

  CHECK(pibar_exact(sub({"xx"})).value == 1);
  CHECK(pibar_exact(sub({"xy"})).value == 1);

  // never exceeds the rank of the subgroup or of the ambient group
  for (auto& words : std::vector<std::vector<std::string>>{
           {"xyx", "yxx"}, {"xx", "yy"}, {"xyXY"}, {"xxyy"}, {"xYxy"}}) {
    BGraph g = sub(words);
    long long p = pibar_exact(g).value;
    CHECK(p <= g.rank());
    CHECK(p <= 2);
    CHECK(p >= 1);
  }

  BGraph big(AXY, 20, 0);
  CHECK_THROWS_AS(pibar_exact(big), precondition_error);
}

TEST_CASE("critical overgroups form a lattice") {
  long long multi = 0;
  for (auto& words : std::vector<std::vector<std::string>>{
           {"x", "y"},
           {"xyx", "yxx"},
           {"y", "xx", "xyX"},
           {"xx", "yy"},
           {"xyXY"},
           {"xxyy"},
           {"xx"},
           {"xYxy"}}) {
    CritLatticeReport r = crit_lattice_check(sub(words));
    CHECK(r.join_closed);
    CHECK(r.meet_closed);
    CHECK(r.crit_size >= 1);
    CHECK(r.pairs_checked == r.crit_size * (r.crit_size + 1) / 2);
    if (r.crit_size >= 2) ++multi;
  }
  // the sweep must exercise a non-trivial lattice at least once
  CHECK(multi >= 1);
}

TEST_CASE("stable compressed rank via covering/quotient search") {
  // free factors: value is rank - 1 for every degree
  for (int d : {1, 2, 3}) {
    InvariantReport r = sbar_pi_d_exact(sub({"x", "y"}), d);
    CHECK(r.finite);
    CHECK(r.value == Rational(1));
    CHECK(r.method == "exact");
    REQUIRE(r.certificate.has_value());
    CHECK(replay_certificate(sub({"x", "y"}), *r.certificate));
  }
  Alphabet axyz = Alphabet::of("xyz");
  BGraph f3 = fold_strings({"x", "y", "z"}, axyz);
  CHECK(sbar_pi_d_exact(f3, 1).value == Rational(2));
  CHECK(sbar_pi_d_exact(f3, 2).value == Rational(2));

  // cyclic subgroups give 0
  for (int d : {1, 2}) {
    CHECK(sbar_pi_d_exact(sub({"xy"}), d).value == Rational(0));
    CHECK(sbar_pi_d_exact(sub({"xx"}), d).value == Rational(0));
  }

  // the pinned rank-2 example at degrees 1 and 2
  BGraph h = sub({"xyx", "yxx"});
  InvariantReport r1 = sbar_pi_d_exact(h, 1);
  CHECK(r1.value == Rational(1));
  InvariantReport r2 = sbar_pi_d_exact(h, 2);
  CHECK(r2.value == Rational(1));
  CHECK(r2.method == "exact");
  REQUIRE(r2.certificate.has_value());
  CHECK(r2.certificate->delta.chi() == -2);
  CHECK(replay_certificate(h, *r2.certificate));

  // at least 1 for every non-cyclic instance searched, and at most pibar - 1
  for (auto& words : std::vector<std::vector<std::string>>{
           {"x", "y"}, {"xyx", "yxx"}, {"y", "xx", "xyX"}, {"xx", "yy"}}) {
    BGraph g = sub(words);
    for (int d : {1, 2}) {
      InvariantReport r = sbar_pi_d_exact(g, d);
      CHECK(r.finite);
      CHECK(r.value >= Rational(1));
      CHECK(r.value <= Rational(pibar_exact(g).value - 1));
    }
  }

  CHECK_THROWS_AS(sbar_pi_d_exact(sub({"x", "y"}), 5, 14, 10), cap_error);
}

TEST_CASE("trivial-covering variant") {
  // degree 1: definitions coincide with pibar - 1
  for (auto& words : std::vector<std::vector<std::string>>{
           {"x", "y"}, {"xyx", "yxx"}, {"y", "xx", "xyX"}, {"xy"}, {"xx", "yy"}}) {
    BGraph g = sub(words);
    InvariantReport r = sbar_pi_d_triv_exact(g, 1);
    CHECK(r.finite);
    CHECK(r.value == Rational(pibar_exact(g).value - 1));
  }

  BGraph h = sub({"xyx", "yxx"});
  InvariantReport t2 = sbar_pi_d_triv_exact(h, 2);
  CHECK(t2.finite);
  CHECK(t2.value >= Rational(1));
  REQUIRE(t2.certificate.has_value());
  CHECK(replay_certificate(h, *t2.certificate));

  // restricting to the trivial covering can only raise the minimum
  for (int d : {1, 2}) {
    CHECK(sbar_pi_d_triv_exact(h, d).value >= sbar_pi_d_exact(h, d).value);
    BGraph w = sub({"x", "y"});
    CHECK(sbar_pi_d_triv_exact(w, d).value >= sbar_pi_d_exact(w, d).value);
  }
}

TEST_CASE("upper bounds toward the stable primitivity rank") {
  // proper power: the shorter cycle is an admissible target of value 0
  InvariantReport pw = spi_d_upper(sub({"xyxy"}), 1);
  CHECK(pw.finite);
  CHECK(pw.value == Rational(0));
  CHECK(pw.method == "upper-bound");
  CHECK(pw.note.find("proper power") != std::string::npos);

  InvariantReport pw3 = spi_d_upper(sub({"xyxyxy"}), 1);
  CHECK(pw3.finite);
  CHECK(pw3.value == Rational(0));

  // non-powers admit no degenerate certificate
  for (auto& words : std::vector<std::vector<std::string>>{{"xy"}, {"xxy"}, {"xxyy"}, {"xYxy"}}) {
    InvariantReport r = spi_d_upper(sub(words), 1);
    CHECK((!r.finite || r.value >= Rational(1)));
  }

  // non-cyclic inputs: bound reported, algebraicity flagged as unchecked
  for (auto& words :
       std::vector<std::vector<std::string>>{{"x", "y"}, {"xyx", "yxx"}, {"y", "xx", "xyX"}}) {
    InvariantReport r = spi_d_upper(sub(words), 2);
    CHECK(r.method == "upper-bound (algebraicity unchecked)");
    CHECK((!r.finite || r.value >= Rational(1)));
  }
}

TEST_CASE("certificate replay rejects tampering") {
  BGraph h = sub({"xyx", "yxx"});
  InvariantReport r = sbar_pi_d_exact(h, 2);
  REQUIRE(r.certificate.has_value());
  InvariantCertificate bad = *r.certificate;
  bad.delta = sub({"x", "y"});
  CHECK_FALSE(replay_certificate(h, bad));
}

TEST_CASE("agreement with word-measure asymptotics") {
  FiniteAction s1 = symmetric_action(1);
  FiniteAction s2 = symmetric_action(2);
  FiniteAction triv2 = explicit_action(2, {});

  for (auto& words : std::vector<std::vector<std::string>>{
           {"x", "y"}, {"xyx", "yxx"}, {"xy"}, {"xx"}}) {
    BGraph g = sub(words);
    // invariant d-subsets decay with exponent -d * (covering/quotient minimum)
    auto [deg1, lead1] = asymptotics(expected_fixed_subsets_symbolic(g, 1, s1));
    CHECK(Rational(-deg1) == sbar_pi_d_exact(g, 1).value);
    auto [deg2, lead2] = asymptotics(expected_fixed_subsets_symbolic(g, 2, s2));
    CHECK(Rational(-deg2, 2) == sbar_pi_d_exact(g, 2).value);
    // d-tuples of distinct points decay with the trivial-covering exponent
    auto [degt, leadt] = asymptotics(expected_fixed_subsets_symbolic(g, 2, triv2));
    CHECK(Rational(-degt, 2) == sbar_pi_d_triv_exact(g, 2).value);
  }
}
