#include "ltcalc/io.hpp"

#include <cctype>

namespace ltcalc::io {

namespace {

[[noreturn]] void bad(const std::string& what) { fail(Errc::ParseError, what); }

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) bad(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

std::string bits_str(const json& j) {
    if (!j.is_string()) bad("expected a bit string");
    return j.get<std::string>();
}

int index_of(const std::string& key) {
    try {
        return std::stoi(key);
    } catch (...) {
        bad("index \"" + key + "\" is not a number");
    }
}

}  // namespace

json to_json(const LargeTree& t) {
    json pairs = json::array();
    for (const BitPair& p : t.explicit_pairs())
        pairs.push_back(json::array({p.q0.str(), p.q1.str()}));
    return json{{"stem", t.stem().str()}, {"pairs", pairs}};
}

LargeTree tree_from_json(const json& j) {
    Bits stem = Bits::parse(bits_str(field(j, "stem")));
    std::vector<BitPair> pairs;
    for (const json& p : field(j, "pairs")) {
        if (!p.is_array() || p.size() != 2) bad("a pair must be a two-element array");
        pairs.push_back(BitPair{Bits::parse(bits_str(p[0])), Bits::parse(bits_str(p[1]))});
    }
    return LargeTree(std::move(stem), std::move(pairs));
}

json to_json(const ForcingSet& p) {
    json gens = json::array();
    for (const LargeTree& t : p.generators()) gens.push_back(to_json(t));
    return json{{"generators", gens}};
}

ForcingSet forcing_from_json(const json& j) {
    std::vector<LargeTree> gens;
    for (const json& t : field(j, "generators")) gens.push_back(tree_from_json(t));
    return ForcingSet(std::move(gens));
}

json to_json(const Multitree& t) {
    json entries = json::object();
    for (const auto& [xi, tree] : t.entries()) entries[std::to_string(xi)] = to_json(tree);
    return json{{"entries", entries}};
}

Multitree multitree_from_json(const json& j) {
    std::map<int, LargeTree> entries;
    for (const auto& [key, value] : field(j, "entries").items())
        entries.emplace(index_of(key), tree_from_json(value));
    return Multitree(std::move(entries));
}

json to_json(const Scheduler& s) {
    return json{{"base", s.base()}};
}

Scheduler scheduler_from_json(const json& j) {
    IndexSet base;
    for (const json& xi : field(j, "base")) base.insert(xi.get<int>());
    return Scheduler(base);
}

json to_json(const Multiforcing& p) {
    json components = json::object();
    for (const auto& [xi, trees] : p.components()) {
        json list = json::array();
        for (const LargeTree& t : trees) list.push_back(to_json(t));
        components[std::to_string(xi)] = list;
    }
    return json{{"components", components}};
}

Multiforcing multiforcing_from_json(const json& j) {
    std::map<int, std::vector<LargeTree>> components;
    for (const auto& [key, value] : field(j, "components").items()) {
        std::vector<LargeTree> trees;
        for (const json& t : value) trees.push_back(tree_from_json(t));
        components.emplace(index_of(key), std::move(trees));
    }
    return Multiforcing(std::move(components));
}

json to_json(const System& s) {
    json rows = json::array();
    for (int k : s.support()) {
        json cells = json::array();
        for (int m = 0; m <= s.nu(k); ++m) cells.push_back(to_json(s.at(k, m)));
        rows.push_back(json{{"k", k}, {"cells", cells}});
    }
    return json{{"rows", rows}};
}

System system_from_json(const json& j) {
    System out;
    for (const json& row : field(j, "rows")) {
        int k = field(row, "k").get<int>();
        int m = 0;
        for (const json& cell : field(row, "cells")) out.put(k, m++, multitree_from_json(cell));
    }
    return out;
}

json to_json(const CcfCode& c) {
    json cells = json::array();
    for (const auto& cell : c.cells()) {
        json u0 = json::array(), u1 = json::array();
        for (const Multitree& t : cell.u0) u0.push_back(to_json(t));
        for (const Multitree& t : cell.u1) u1.push_back(to_json(t));
        cells.push_back(json::array({u0, u1}));
    }
    return json{{"base", c.base()}, {"horizon", c.horizon()}, {"cells", cells}};
}

CcfCode code_from_json(const json& j) {
    IndexSet base;
    for (const json& xi : field(j, "base")) base.insert(xi.get<int>());
    std::size_t horizon = field(j, "horizon").get<std::size_t>();
    std::vector<CcfCode::Cell> cells;
    for (const json& cell : field(j, "cells")) {
        if (!cell.is_array() || cell.size() != 2) bad("a code cell must be [U0, U1]");
        CcfCode::Cell out;
        for (const json& t : cell[0]) out.u0.push_back(multitree_from_json(t));
        for (const json& t : cell[1]) out.u1.push_back(multitree_from_json(t));
        cells.push_back(std::move(out));
    }
    if (cells.size() != horizon) bad("cell count differs from the declared horizon");
    return CcfCode(std::move(base), std::move(cells));
}

json to_json(const BrickPoint& x) {
    json out = json::object();
    for (const auto& [xi, bits] : x.coords) out[std::to_string(xi)] = bits.str();
    return out;
}

BrickPoint point_from_json(const json& j) {
    BrickPoint out;
    if (!j.is_object()) bad("a point is an object of index → bits");
    for (const auto& [key, value] : j.items())
        out.coords.emplace(index_of(key), Bits::parse(bits_str(value)));
    return out;
}

json to_json(const Permutation& h) {
    json swaps = json::array();
    IndexSet seen;
    for (int xi : h.domain()) {
        if (seen.count(xi)) continue;
        seen.insert(xi);
        seen.insert(h(xi));
        if (h(xi) != xi) swaps.push_back(json::array({xi, h(xi)}));
    }
    return json{{"swaps", swaps}};
}

Permutation permutation_from_json(const json& j) {
    std::vector<std::pair<int, int>> swaps;
    for (const json& s : field(j, "swaps")) {
        if (!s.is_array() || s.size() != 2) bad("a swap must be a two-element array");
        swaps.emplace_back(s[0].get<int>(), s[1].get<int>());
    }
    return Permutation::from_swaps(swaps);
}

// --- s-expressions ---------------------------------------------------------

namespace {

struct SexprParser {
    const std::string& text;
    std::size_t pos = 0;

    void skip() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    char peek() {
        skip();
        if (pos >= text.size()) bad("unexpected end of formula text");
        return text[pos];
    }

    void expect(char c) {
        if (peek() != c) bad(std::string("expected '") + c + "' at offset " + std::to_string(pos));
        ++pos;
    }

    std::string token() {
        skip();
        std::size_t start = pos;
        while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
               text[pos] != '(' && text[pos] != ')')
            ++pos;
        if (start == pos) bad("expected a token at offset " + std::to_string(pos));
        return text.substr(start, pos - start);
    }

    bool at_number(const std::string& tok) const {
        return !tok.empty() && std::all_of(tok.begin(), tok.end(), [](char c) {
            return std::isdigit(static_cast<unsigned char>(c));
        });
    }

    Term term() {
        if (peek() == '(') {
            expect('(');
            std::string head = token();
            if (head != "bit") bad("only (bit <object> <term>) composes terms");
            std::string object = token();
            Term idx = term();
            expect(')');
            return Term::bit(std::move(object), std::move(idx));
        }
        std::string tok = token();
        if (at_number(tok)) return Term::lit(std::stoull(tok));
        return Term::v0(std::move(tok));
    }

    FormulaPtr formula() {
        expect('(');
        std::string head = token();
        FormulaPtr out;
        if (head == "atom") {
            std::string rel = token();
            std::vector<Term> args;
            while (peek() != ')') args.push_back(term());
            out = atom(std::move(rel), std::move(args));
        } else if (head == "not") {
            out = lnot(formula());
        } else if (head == "and" || head == "or") {
            std::vector<FormulaPtr> children;
            while (peek() != ')') children.push_back(formula());
            if (children.empty()) bad(head + " needs at least one formula");
            out = head == "and" ? land(std::move(children)) : lor(std::move(children));
        } else if (head == "exists0" || head == "forall0") {
            std::string var = token();
            std::string bound = token();
            if (!at_number(bound)) bad("type-0 quantifier bound must be a number");
            out = quant0(head == "exists0", std::move(var), std::stoull(bound), formula());
        } else if (head == "exists" || head == "forall" || head == "exists1" ||
                   head == "forall1") {
            std::string var = token();
            out = quant1(head == "exists" || head == "exists1", std::move(var), formula());
        } else {
            bad("unknown formula head \"" + head + "\"");
        }
        expect(')');
        return out;
    }
};

void render_term(const Term& t, std::string& out) {
    switch (t.kind) {
        case Term::Kind::Literal: out += std::to_string(t.literal); return;
        case Term::Kind::Var: out += t.var; return;
        case Term::Kind::Bit:
            out += "(bit " + t.object + " ";
            render_term(*t.index, out);
            out += ")";
            return;
    }
}

void render(const Formula& f, std::string& out) {
    switch (f.kind) {
        case Formula::Kind::Atom:
            out += "(atom " + f.rel;
            for (const Term& t : f.args) {
                out += " ";
                render_term(t, out);
            }
            out += ")";
            return;
        case Formula::Kind::Not:
            out += "(not ";
            render(*f.children[0], out);
            out += ")";
            return;
        case Formula::Kind::And:
        case Formula::Kind::Or:
            out += f.kind == Formula::Kind::And ? "(and" : "(or";
            for (const auto& child : f.children) {
                out += " ";
                render(*child, out);
            }
            out += ")";
            return;
        case Formula::Kind::Quant0:
            out += (f.exists ? "(exists0 " : "(forall0 ") + f.var + " " +
                   std::to_string(f.bound) + " ";
            render(*f.body, out);
            out += ")";
            return;
        case Formula::Kind::Quant1:
            out += (f.exists ? "(exists1 " : "(forall1 ") + f.var + " ";
            render(*f.body, out);
            out += ")";
            return;
    }
}

}  // namespace

std::string to_sexpr(const FormulaPtr& f) {
    std::string out;
    render(*f, out);
    return out;
}

FormulaPtr formula_from_sexpr(const std::string& text) {
    SexprParser parser{text};
    FormulaPtr out = parser.formula();
    parser.skip();
    if (parser.pos != text.size()) bad("trailing text after the formula");
    return out;
}

json to_json(const FormulaDoc& doc) {
    json codes = json::object();
    for (const auto& [name, code] : doc.codes) codes[name] = to_json(code);
    json rels = json::object();
    for (const auto& [name, table] : doc.rels) {
        json tuples = json::array();
        for (const auto& tuple : table.tuples) tuples.push_back(tuple);
        rels[name] = json{{"arity", table.arity}, {"bound", table.bound}, {"tuples", tuples}};
    }
    return json{{"formula", to_sexpr(doc.root)}, {"codes", codes}, {"rels", rels}};
}

FormulaDoc formula_doc_from_json(const json& j) {
    FormulaDoc out;
    out.root = formula_from_sexpr(field(j, "formula").get<std::string>());
    if (j.contains("codes"))
        for (const auto& [name, code] : j.at("codes").items())
            out.codes.emplace(name, code_from_json(code));
    if (j.contains("rels"))
        for (const auto& [name, rel] : j.at("rels").items()) {
            RelTable table;
            table.arity = field(rel, "arity").get<std::size_t>();
            table.bound = field(rel, "bound").get<std::size_t>();
            for (const json& tuple : field(rel, "tuples"))
                table.tuples.insert(tuple.get<std::vector<std::size_t>>());
            out.rels.emplace(name, std::move(table));
        }
    return out;
}

json to_json(const MExtensionBundle& b) {
    json dense = json::object();
    for (const auto& [xi, sets] : b.dense_sets) {
        json lists = json::array();
        for (const auto& set : sets) {
            json list = json::array();
            for (const LargeTree& t : set) list.push_back(to_json(t));
            lists.push_back(list);
        }
        dense[std::to_string(xi)] = lists;
    }
    json cw = json::array();
    for (const auto& w : b.c_witnesses) {
        json sets = json::array();
        for (const auto& set : w.open_dense) {
            json list = json::array();
            for (const Multitree& t : set) list.push_back(to_json(t));
            sets.push_back(list);
        }
        cw.push_back(json{{"t", to_json(w.t)}, {"s", to_json(w.s)}, {"open_dense", sets}});
    }
    json dw = json::array();
    for (const auto& w : b.d_witnesses)
        dw.push_back(json{{"t", to_json(w.t)},
                          {"xi", w.xi},
                          {"code", to_json(w.code)},
                          {"s", to_json(w.s)},
                          {"branch", w.branch}});
    return json{{"sample_depth", b.sample_depth},
                {"dense_sets", dense},
                {"c_witnesses", cw},
                {"d_witnesses", dw}};
}

MExtensionBundle bundle_from_json(const json& j) {
    MExtensionBundle out;
    if (j.contains("sample_depth")) out.sample_depth = j.at("sample_depth").get<std::size_t>();
    if (j.contains("dense_sets"))
        for (const auto& [key, lists] : j.at("dense_sets").items()) {
            std::vector<std::vector<LargeTree>> sets;
            for (const json& list : lists) {
                std::vector<LargeTree> trees;
                for (const json& t : list) trees.push_back(tree_from_json(t));
                sets.push_back(std::move(trees));
            }
            out.dense_sets.emplace(index_of(key), std::move(sets));
        }
    if (j.contains("c_witnesses"))
        for (const json& w : j.at("c_witnesses")) {
            MExtensionBundle::CWitness cw;
            cw.t = multitree_from_json(field(w, "t"));
            cw.s = multitree_from_json(field(w, "s"));
            if (w.contains("open_dense"))
                for (const json& list : w.at("open_dense")) {
                    std::vector<Multitree> set;
                    for (const json& t : list) set.push_back(multitree_from_json(t));
                    cw.open_dense.push_back(std::move(set));
                }
            out.c_witnesses.push_back(std::move(cw));
        }
    if (j.contains("d_witnesses"))
        for (const json& w : j.at("d_witnesses")) {
            MExtensionBundle::DWitness dw;
            dw.t = multitree_from_json(field(w, "t"));
            dw.xi = field(w, "xi").get<int>();
            dw.code = code_from_json(field(w, "code"));
            dw.s = multitree_from_json(field(w, "s"));
            dw.branch = field(w, "branch").get<int>();
            out.d_witnesses.push_back(std::move(dw));
        }
    return out;
}

json to_json(const MExtensionReport& r) {
    auto clause = [](const ClauseReport& c) {
        return json{{"pass", c.pass}, {"detail", c.detail}};
    };
    return json{{"A", clause(r.a)},
                {"B", clause(r.b)},
                {"C", clause(r.c)},
                {"D", clause(r.d)},
                {"sample_depth", r.sample_depth},
                {"all", r.all()}};
}

}  // namespace ltcalc::io
