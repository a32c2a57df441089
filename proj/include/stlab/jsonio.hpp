#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "stlab/action.hpp"
#include "stlab/bgraph.hpp"
#include "stlab/ffr.hpp"
#include "stlab/fqmodule.hpp"

namespace stlab {

using Json = nlohmann::json;

// {"letters":["x","y"],"vertices":4,"basepoint":0,"edges":{"x":[[0,1]],...}}
Json graph_to_json(const BGraph& g);
BGraph graph_from_json(const Json& j);

std::vector<std::string> word_list_from_json(const Json& j);

// {"kind":"symmetric","n":4} | {"kind":"gl","n":2,"q":2} |
// {"kind":"subsets","n":6,"d":2} | {"kind":"explicit","points":m,"generators":[[...]]}
FiniteAction action_from_json(const Json& j);

Rational rational_from_json(const Json& j);  // string "p/q" or integer
Json rational_to_json(const Rational& r);    // string

// Term list plus the reduced rational-function form with degree and leading
// coefficient.
Json expression_to_json(const FallingFactorialRational& f);

// {"q":2,"m":1,"ring":"F"|{"H":["ab","ba"]},"generators":[[["x",1,"1"],...],...]}
// with 1-based basis indices; ring "F" uses the ambient alphabet, ring "H"
// the abstract letters of a subgroup basis.
FqSubmodule module_from_json(const Json& j, const Alphabet& ambient);
Json module_to_json(const FqSubmodule& m, bool ambient_ring);

}  // namespace stlab
