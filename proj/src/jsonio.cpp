#include "stlab/jsonio.hpp"

#include <sstream>

#include "stlab/errors.hpp"

namespace stlab {

Json graph_to_json(const BGraph& g) {
  Json j;
  j["letters"] = g.alphabet.letters;
  j["vertices"] = g.nv;
  j["basepoint"] = g.basepoint;
  Json edges = Json::object();
  for (int l = 0; l < g.letters(); ++l) {
    Json es = Json::array();
    for (auto [s, t] : g.edges[l]) es.push_back(Json::array({s, t}));
    edges[g.alphabet.letters[l]] = std::move(es);
  }
  j["edges"] = std::move(edges);
  return j;
}

BGraph graph_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("letters") || !j.contains("vertices"))
    throw precondition_error("graph JSON needs letters and vertices");
  std::vector<std::string> letters = j.at("letters").get<std::vector<std::string>>();
  Alphabet a(letters);
  int nv = j.at("vertices").get<int>();
  int bp = j.value("basepoint", -1);
  BGraph g(a, nv, bp);
  if (j.contains("edges")) {
    for (auto& [name, list] : j.at("edges").items()) {
      int l = a.index(name);
      if (l < 0) throw precondition_error("unknown letter in edges: " + name);
      for (const Json& e : list) {
        int s = e.at(0).get<int>(), t = e.at(1).get<int>();
        if (s < 0 || s >= nv || t < 0 || t >= nv)
          throw precondition_error("edge endpoint out of range");
        g.add_edge(l, s, t);
      }
    }
  }
  if (!g.folded()) throw precondition_error("graph JSON is not folded");
  return g;
}

std::vector<std::string> word_list_from_json(const Json& j) {
  if (!j.is_array()) throw precondition_error("expected a JSON array of words");
  return j.get<std::vector<std::string>>();
}

FiniteAction action_from_json(const Json& j) {
  std::string kind = j.value("kind", "");
  if (kind == "symmetric") return symmetric_action(j.at("n").get<int>());
  if (kind == "gl") return gl_action(j.at("n").get<int>(), j.at("q").get<int>());
  if (kind == "subsets") return subsets_action(j.at("n").get<int>(), j.at("d").get<int>());
  if (kind == "explicit")
    return explicit_action(j.at("points").get<int>(),
                           j.at("generators").get<std::vector<std::vector<int>>>());
  throw precondition_error("unknown action kind: " + kind);
}

Rational rational_from_json(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw precondition_error("expected a rational as integer or \"p/q\" string");
}

Json rational_to_json(const Rational& r) { return rational_str(r); }

Json expression_to_json(const FallingFactorialRational& f) {
  Json j;
  Json terms = Json::array();
  for (const FFTerm& t : f.terms()) {
    Json term;
    term["coeff"] = rational_to_json(t.coeff);
    term["num"] = t.num;
    term["den"] = t.den;
    terms.push_back(std::move(term));
  }
  j["terms"] = std::move(terms);
  PolyFrac c = f.canonical();
  auto [num, den] = c.integer_pair();
  Json canon;
  Json cn = Json::array(), cd = Json::array();
  for (const Int& x : num) cn.push_back(x.str());
  for (const Int& x : den) cd.push_back(x.str());
  canon["num"] = std::move(cn);
  canon["den"] = std::move(cd);
  j["canonical"] = std::move(canon);
  if (!f.is_zero()) {
    auto [deg, lead] = asymptotics(f);
    j["degree"] = deg;
    j["leading"] = rational_to_json(lead);
  }
  return j;
}

FqSubmodule module_from_json(const Json& j, const Alphabet& ambient) {
  FqSubmodule m;
  m.field = Fq::make(j.at("q").get<int>());
  m.m = j.at("m").get<int>();
  if (m.m < 1) throw precondition_error("module coordinate count must be positive");
  const Json& ring = j.at("ring");
  if (ring.is_string() && ring.get<std::string>() == "F") {
    m.ring = ambient;
  } else if (ring.is_object() && ring.contains("H")) {
    m.ring = ring_alphabet(static_cast<int>(ring.at("H").size()));
  } else {
    throw precondition_error("module ring must be \"F\" or {\"H\":[...basis...]}");
  }
  for (const Json& gen : j.at("generators")) {
    ModuleElement e;
    for (const Json& triple : gen) {
      Word w = Word::parse(triple.at(0).get<std::string>(), m.ring);
      int idx = triple.at(1).get<int>();  // 1-based
      if (idx < 1 || idx > m.m) throw precondition_error("basis index out of range");
      Rational s = rational_from_json(triple.at(2));
      if (boost::multiprecision::denominator(s) != 1)
        throw precondition_error("module scalars must be integers");
      long long si = boost::multiprecision::numerator(s).convert_to<long long>();
      // scalars use the field's integer encoding 0..q-1; for prime fields any
      // integer reduces mod p, negatives included
      int scalar;
      if (m.field.k == 1) {
        scalar = static_cast<int>(((si % m.field.p) + m.field.p) % m.field.p);
      } else {
        if (si < 0 || si >= m.field.q)
          throw precondition_error("scalar outside the field encoding range");
        scalar = static_cast<int>(si);
      }
      me_add_scaled(m.field, e, scalar, me_monomial(idx - 1, w));
    }
    if (!e.is_zero()) m.gens.push_back(std::move(e));
  }
  return m;
}

Json module_to_json(const FqSubmodule& m, bool ambient_ring) {
  Json j;
  j["q"] = m.field.q;
  j["m"] = m.m;
  if (ambient_ring) {
    j["ring"] = "F";
  } else {
    Json r;
    r["H"] = m.ring.letters;
    j["ring"] = std::move(r);
  }
  Json gens = Json::array();
  for (const ModuleElement& e : m.gens) {
    Json g = Json::array();
    for (const auto& [mono, c] : e.c)
      g.push_back(Json::array({mono.w.str(m.ring), mono.i + 1, std::to_string(c)}));
    gens.push_back(std::move(g));
  }
  j["generators"] = std::move(gens);
  return j;
}

}  // namespace stlab
