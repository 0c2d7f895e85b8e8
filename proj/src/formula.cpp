#include "ltcalc/formula.hpp"

#include <algorithm>

namespace ltcalc {

Term Term::lit(std::size_t n) {
    Term t;
    t.kind = Kind::Literal;
    t.literal = n;
    return t;
}

Term Term::v0(std::string name) {
    Term t;
    t.kind = Kind::Var;
    t.var = std::move(name);
    return t;
}

Term Term::bit(std::string object, Term index) {
    Term t;
    t.kind = Kind::Bit;
    t.object = std::move(object);
    t.index = std::make_shared<Term>(std::move(index));
    return t;
}

FormulaPtr atom(std::string rel, std::vector<Term> args) {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::Atom;
    f->rel = std::move(rel);
    f->args = std::move(args);
    return f;
}

FormulaPtr lnot(FormulaPtr g) {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::Not;
    f->children = {std::move(g)};
    return f;
}

FormulaPtr land(std::vector<FormulaPtr> fs) {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::And;
    f->children = std::move(fs);
    return f;
}

FormulaPtr lor(std::vector<FormulaPtr> fs) {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::Or;
    f->children = std::move(fs);
    return f;
}

FormulaPtr quant0(bool exists, std::string var, std::size_t bound, FormulaPtr body) {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::Quant0;
    f->exists = exists;
    f->var = std::move(var);
    f->bound = bound;
    f->body = std::move(body);
    return f;
}

FormulaPtr quant1(bool exists, std::string var, FormulaPtr body) {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::Quant1;
    f->exists = exists;
    f->var = std::move(var);
    f->body = std::move(body);
    return f;
}

namespace {

void collect_objects(const Term& t, std::set<std::string>& out) {
    if (t.kind == Term::Kind::Bit) {
        out.insert(t.object);
        collect_objects(*t.index, out);
    }
}

void collect_objects(const Formula& f, std::set<std::string>& out) {
    for (const Term& t : f.args) collect_objects(t, out);
    for (const auto& child : f.children) collect_objects(*child, out);
    if (f.body) collect_objects(*f.body, out);
}

bool has_quant1(const Formula& f) {
    if (f.kind == Formula::Kind::Quant1) return true;
    for (const auto& child : f.children)
        if (has_quant1(*child)) return true;
    return f.body && has_quant1(*f.body);
}

void check_matrix(const Formula& f, const FormulaDoc& doc, std::set<std::string> vars0,
                  const std::set<std::string>& vars1) {
    switch (f.kind) {
        case Formula::Kind::Atom: {
            auto check_term = [&](const auto& self, const Term& t) -> void {
                switch (t.kind) {
                    case Term::Kind::Literal: return;
                    case Term::Kind::Var:
                        if (!vars0.count(t.var))
                            fail(Errc::NotNormal, "unbound type-0 variable " + t.var);
                        return;
                    case Term::Kind::Bit:
                        if (!vars1.count(t.object) && !doc.codes.count(t.object))
                            fail(Errc::NotNormal,
                                 "type-1 object " + t.object + " is neither bound nor a code");
                        self(self, *t.index);
                        return;
                }
            };
            for (const Term& t : f.args) check_term(check_term, t);
            if (f.rel != "eq" && f.rel != "ne" && f.rel != "lt" && f.rel != "le") {
                auto it = doc.rels.find(f.rel);
                if (it == doc.rels.end())
                    fail(Errc::NotNormal, "unknown relation " + f.rel);
                if (it->second.arity != f.args.size())
                    fail(Errc::NotNormal, "relation " + f.rel + " arity mismatch");
            } else if (f.args.size() != 2) {
                fail(Errc::NotNormal, "builtin relation " + f.rel + " takes two terms");
            }
            return;
        }
        case Formula::Kind::Not:
        case Formula::Kind::And:
        case Formula::Kind::Or:
            for (const auto& child : f.children) check_matrix(*child, doc, vars0, vars1);
            return;
        case Formula::Kind::Quant0: {
            auto inner = vars0;
            inner.insert(f.var);
            check_matrix(*f.body, doc, std::move(inner), vars1);
            return;
        }
        case Formula::Kind::Quant1:
            fail(Errc::NotNormal, "type-1 quantifier inside the arithmetic matrix");
    }
}

}  // namespace

Classification classify(const FormulaDoc& doc) {
    if (!doc.root) fail(Errc::NotNormal, "empty formula");
    const Formula* cur = doc.root.get();
    std::set<std::string> vars1;
    Classification out;
    bool first = true;
    bool last_exists = false;
    while (cur->kind == Formula::Kind::Quant1) {
        if (!first && cur->exists == last_exists)
            fail(Errc::NotNormal, "type-1 prefix must strictly alternate");
        if (first) out.kind = cur->exists ? Classification::Kind::Sigma : Classification::Kind::Pi;
        last_exists = cur->exists;
        first = false;
        ++out.n;
        vars1.insert(cur->var);
        cur = cur->body.get();
    }
    if (out.n == 0) out.kind = Classification::Kind::Arithmetic;
    check_matrix(*cur, doc, {}, vars1);
    return out;
}

namespace {

FormulaPtr negate_matrix(const FormulaPtr& f) {
    switch (f->kind) {
        case Formula::Kind::Atom: return lnot(f);
        case Formula::Kind::Not: return f->children[0];
        case Formula::Kind::And: {
            std::vector<FormulaPtr> out;
            for (const auto& child : f->children) out.push_back(negate_matrix(child));
            return lor(std::move(out));
        }
        case Formula::Kind::Or: {
            std::vector<FormulaPtr> out;
            for (const auto& child : f->children) out.push_back(negate_matrix(child));
            return land(std::move(out));
        }
        case Formula::Kind::Quant0:
            return quant0(!f->exists, f->var, f->bound, negate_matrix(f->body));
        case Formula::Kind::Quant1:
            fail(Errc::NotNormal, "type-1 quantifier inside the arithmetic matrix");
    }
    fail(Errc::NotNormal, "unreachable");
}

FormulaPtr negate_normal(const FormulaPtr& f) {
    if (f->kind == Formula::Kind::Quant1)
        return quant1(!f->exists, f->var, negate_normal(f->body));
    return negate_matrix(f);
}

}  // namespace

FormulaDoc negate(const FormulaDoc& doc) {
    classify(doc);  // validates normal form
    FormulaDoc out = doc;
    out.root = negate_normal(doc.root);
    return out;
}

IndexSet support(const FormulaDoc& doc) {
    std::set<std::string> names;
    collect_objects(*doc.root, names);
    IndexSet out;
    for (const auto& name : names) {
        auto it = doc.codes.find(name);
        if (it == doc.codes.end()) continue;
        for (int xi : it->second.base()) out.insert(xi);
    }
    return out;
}

Permutation Permutation::from_swaps(const std::vector<std::pair<int, int>>& swaps) {
    Permutation h;
    for (auto [a, b] : swaps) {
        if (h.moved_.count(a) || h.moved_.count(b))
            fail(Errc::PreconditionFailed, "transpositions must be disjoint");
        h.moved_[a] = b;
        h.moved_[b] = a;
    }
    return h;
}

int Permutation::operator()(int xi) const {
    auto it = moved_.find(xi);
    return it == moved_.end() ? xi : it->second;
}

IndexSet Permutation::map(const IndexSet& b) const {
    IndexSet out;
    for (int xi : b) out.insert((*this)(xi));
    return out;
}

IndexSet Permutation::domain() const {
    IndexSet out;
    for (const auto& [a, b] : moved_) out.insert(a);
    return out;
}

BrickPoint Permutation::act(const BrickPoint& x) const {
    BrickPoint out;
    for (const auto& [xi, bits] : x.coords) out.coords.emplace((*this)(xi), bits);
    return out;
}

Multitree Permutation::act(const Multitree& t) const {
    std::map<int, LargeTree> entries;
    for (const auto& [xi, tree] : t.entries()) entries.emplace((*this)(xi), tree);
    return Multitree(std::move(entries));
}

CcfCode Permutation::act(const CcfCode& c) const {
    std::vector<CcfCode::Cell> cells;
    cells.reserve(c.horizon());
    for (const auto& cell : c.cells()) {
        CcfCode::Cell moved;
        for (const Multitree& t : cell.u0) moved.u0.push_back(act(t));
        for (const Multitree& t : cell.u1) moved.u1.push_back(act(t));
        cells.push_back(std::move(moved));
    }
    return CcfCode(map(c.base()), std::move(cells));
}

FormulaDoc Permutation::act(const FormulaDoc& doc) const {
    FormulaDoc out = doc;
    for (auto& [name, code] : out.codes) code = act(code);
    return out;
}

namespace {

struct EvalEnv {
    const FormulaDoc& doc;
    const BrickPoint& x;
    std::map<std::string, std::size_t> vars0;
};

std::size_t eval_term(const Term& t, EvalEnv& env) {
    switch (t.kind) {
        case Term::Kind::Literal: return t.literal;
        case Term::Kind::Var: {
            auto it = env.vars0.find(t.var);
            if (it == env.vars0.end()) fail(Errc::NotNormal, "unbound variable " + t.var);
            return it->second;
        }
        case Term::Kind::Bit: {
            auto it = env.doc.codes.find(t.object);
            if (it == env.doc.codes.end())
                fail(Errc::NotArithmetic, "type-1 variable " + t.object + " not substituted");
            std::size_t k = eval_term(*t.index, env);
            const CcfCode& code = it->second;
            if (k >= code.horizon())
                fail(Errc::InsufficientDepth, "bit index " + std::to_string(k) +
                                                  " beyond the code's horizon");
            Bits value = eval_code(code, env.x.restricted(code.base()));
            return static_cast<std::size_t>(value.at(k));
        }
    }
    fail(Errc::NotNormal, "unreachable");
}

bool eval_formula(const Formula& f, EvalEnv& env) {
    switch (f.kind) {
        case Formula::Kind::Atom: {
            std::vector<std::size_t> vals;
            vals.reserve(f.args.size());
            for (const Term& t : f.args) vals.push_back(eval_term(t, env));
            if (f.rel == "eq") return vals[0] == vals[1];
            if (f.rel == "ne") return vals[0] != vals[1];
            if (f.rel == "lt") return vals[0] < vals[1];
            if (f.rel == "le") return vals[0] <= vals[1];
            const RelTable& table = env.doc.rels.at(f.rel);
            for (std::size_t v : vals)
                if (v >= table.bound) return false;
            return table.tuples.count(vals) != 0;
        }
        case Formula::Kind::Not: return !eval_formula(*f.children[0], env);
        case Formula::Kind::And:
            for (const auto& child : f.children)
                if (!eval_formula(*child, env)) return false;
            return true;
        case Formula::Kind::Or:
            for (const auto& child : f.children)
                if (eval_formula(*child, env)) return true;
            return false;
        case Formula::Kind::Quant0: {
            for (std::size_t v = 0; v < f.bound; ++v) {
                env.vars0[f.var] = v;
                bool holds = eval_formula(*f.body, env);
                env.vars0.erase(f.var);
                if (f.exists && holds) return true;
                if (!f.exists && !holds) return false;
            }
            return !f.exists;
        }
        case Formula::Kind::Quant1:
            fail(Errc::NotArithmetic, "type-1 quantifier in a closed evaluation");
    }
    fail(Errc::NotNormal, "unreachable");
}

}  // namespace

bool eval_closed(const FormulaDoc& doc, const BrickPoint& x) {
    Classification c = classify(doc);
    if (c.kind != Classification::Kind::Arithmetic)
        fail(Errc::NotArithmetic, "eval_closed needs an arithmetic formula");
    EvalEnv env{doc, x, {}};
    return eval_formula(*doc.root, env);
}

bool forc_base(const Multitree& t, const FormulaDoc& doc) {
    Classification c = classify(doc);
    if (c.kind != Classification::Kind::Arithmetic)
        fail(Errc::NotArithmetic, "forc_base decides the arithmetic fragment only");
    IndexSet supp = support(doc);
    for (int xi : supp)
        if (!t.has(xi))
            fail(Errc::SupportNotContained,
                 "formula support index " + std::to_string(xi) + " outside |T|");
    std::size_t depth = 1;
    for (const auto& [name, code] : doc.codes)
        depth = std::max(depth, code.max_dependence_depth());
    for (const BrickPoint& x : brick_quotient(t, depth))
        if (!eval_closed(doc, x)) return false;
    return true;
}

namespace {

// Substitutes a code name for a type-1 variable in every bit term.
Term substitute(const Term& t, const std::string& var, const std::string& code_name) {
    if (t.kind != Term::Kind::Bit) return t;
    Term out = t;
    if (out.object == var) out.object = code_name;
    out.index = std::make_shared<Term>(substitute(*out.index, var, code_name));
    return out;
}

FormulaPtr substitute(const FormulaPtr& f, const std::string& var,
                      const std::string& code_name) {
    auto out = std::make_shared<Formula>(*f);
    out->args.clear();
    for (const Term& t : f->args) out->args.push_back(substitute(t, var, code_name));
    out->children.clear();
    for (const auto& child : f->children)
        out->children.push_back(substitute(child, var, code_name));
    if (f->body) out->body = substitute(f->body, var, code_name);
    return out;
}

}  // namespace

bool forc_exists_witness(const Multitree& t, const FormulaDoc& doc, const CcfCode& witness) {
    if (!doc.root || doc.root->kind != Formula::Kind::Quant1 || !doc.root->exists)
        fail(Errc::PreconditionFailed, "witness checking needs a leading type-1 ∃");
    std::string name = "witness$" + doc.root->var;
    while (doc.codes.count(name)) name += "'";
    FormulaDoc inner;
    inner.root = substitute(doc.root->body, doc.root->var, name);
    inner.codes = doc.codes;
    inner.codes.emplace(name, witness);
    inner.rels = doc.rels;
    Classification c = classify(inner);
    if (c.kind != Classification::Kind::Arithmetic)
        fail(Errc::NotArithmetic,
             "after the witness the formula must land in the decidable fragment");
    return forc_base(t, inner);
}

}  // namespace ltcalc
