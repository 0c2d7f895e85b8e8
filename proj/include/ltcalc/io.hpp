#pragma once

#include <string>

#include "json.hpp"

#include "ltcalc/formula.hpp"
#include "ltcalc/mextension.hpp"

namespace ltcalc::io {

using nlohmann::json;

// Document schemas. Trees: { "stem": "<bits>", "pairs": [["q0","q1"], …] }.
json to_json(const LargeTree& t);
LargeTree tree_from_json(const json& j);

// { "generators": [tree, …] }
json to_json(const ForcingSet& p);
ForcingSet forcing_from_json(const json& j);

// { "entries": { "<index>": tree, … } }
json to_json(const Multitree& t);
Multitree multitree_from_json(const json& j);

// { "base": [indices] }
json to_json(const Scheduler& s);
Scheduler scheduler_from_json(const json& j);

// { "components": { "<index>": [tree, …] } }
json to_json(const Multiforcing& p);
Multiforcing multiforcing_from_json(const json& j);

// { "rows": [{ "k": n, "cells": [multitree, …] }] }
json to_json(const System& s);
System system_from_json(const json& j);

// { "base": [indices], "horizon": K, "cells": [[ [mt,…], [mt,…] ], …] }
json to_json(const CcfCode& c);
CcfCode code_from_json(const json& j);

// { "<index>": "<bits>" }
json to_json(const BrickPoint& x);
BrickPoint point_from_json(const json& j);

// { "swaps": [[a, b], …] }
json to_json(const Permutation& h);
Permutation permutation_from_json(const json& j);

// Formulas travel as s-expression text, e.g.
//   (exists x1 (and (atom eq (bit x1 0) 1)))
// with codes and relation tables in sidecar maps:
// { "formula": "<s-expr>", "codes": { name: code }, "rels": { name:
//   { "arity": n, "bound": b, "tuples": [[…], …] } } }
std::string to_sexpr(const FormulaPtr& f);
FormulaPtr formula_from_sexpr(const std::string& text);

json to_json(const FormulaDoc& doc);
FormulaDoc formula_doc_from_json(const json& j);

// Witness bundle for the multiforcing-extension check; see the README for
// the field layout.
json to_json(const MExtensionBundle& b);
MExtensionBundle bundle_from_json(const json& j);

json to_json(const MExtensionReport& r);

}  // namespace ltcalc::io
