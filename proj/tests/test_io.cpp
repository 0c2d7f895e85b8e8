#include "doctest.h"

#include "ltcalc/io.hpp"

using namespace ltcalc;

namespace {
Bits b(const char* s) { return Bits::parse(s); }
}

TEST_CASE("documents survive a parse-serialize-parse roundtrip") {
    LargeTree tree(b("1"), {BitPair{b("0"), b("1")}, BitPair{b("01"), b("11")}});
    CHECK(io::tree_from_json(io::to_json(tree)) == tree);

    ForcingSet p({tree, LargeTree::around(b("01"))});
    CHECK(io::forcing_from_json(io::to_json(p)) == p);

    Multitree t({{0, tree}, {5, LargeTree::cohen()}});
    CHECK(io::multitree_from_json(io::to_json(t)) == t);

    Scheduler sched({2, 9});
    CHECK(io::scheduler_from_json(io::to_json(sched)).base() == sched.base());

    Multiforcing mf({{0, {LargeTree::cohen(), tree}}, {1, {LargeTree::cohen()}}});
    CHECK(io::multiforcing_from_json(io::to_json(mf)).components() == mf.components());

    System sys;
    sys.put(0, 0, t);
    sys.put(0, 1, t);
    CHECK(io::system_from_json(io::to_json(sys)) == sys);

    CcfCode code = code_from_table({0, 1}, 2, 2, [](const BrickPoint& x) { return x.at(1); });
    CHECK(io::code_from_json(io::to_json(code)) == code);

    BrickPoint x{{{0, b("011")}, {1, b("")}}};
    auto x2 = io::point_from_json(io::to_json(x));
    CHECK(x2 == x);

    Permutation h = Permutation::from_swaps({{1, 4}, {2, 7}});
    Permutation h2 = io::permutation_from_json(io::to_json(h));
    for (int xi : {1, 2, 4, 7, 9}) CHECK(h(xi) == h2(xi));
}

TEST_CASE("formula s-expressions") {
    auto f = io::formula_from_sexpr("(exists x1 (and (atom eq (bit x1 0) 1)))");
    CHECK(f->kind == Formula::Kind::Quant1);
    CHECK(f->exists);
    CHECK(f->body->kind == Formula::Kind::And);

    auto g = io::formula_from_sexpr(
        "(forall1 y (or (not (atom le k 3)) (exists0 k 4 (atom eq k (bit y k)))))");
    CHECK(io::formula_from_sexpr(io::to_sexpr(g))->kind == g->kind);
    CHECK(io::to_sexpr(io::formula_from_sexpr(io::to_sexpr(g))) == io::to_sexpr(g));

    CHECK_THROWS_AS(io::formula_from_sexpr("(frob x)"), CalcError);
    CHECK_THROWS_AS(io::formula_from_sexpr("(atom eq 0 0) trailing"), CalcError);
    CHECK_THROWS_AS(io::formula_from_sexpr("(exists0 k (atom eq 0 0))"), CalcError);
}

TEST_CASE("formula documents") {
    CcfCode code = code_from_table({3}, 1, 1, [](const BrickPoint& x) { return x.at(3); });
    FormulaDoc doc;
    doc.root = io::formula_from_sexpr("(atom eq (bit c 0) 1)");
    doc.codes.emplace("c", code);
    doc.rels.emplace("odd", RelTable{1, 4, {{1}, {3}}});

    FormulaDoc parsed = io::formula_doc_from_json(io::to_json(doc));
    CHECK(io::to_sexpr(parsed.root) == io::to_sexpr(doc.root));
    CHECK(parsed.codes.at("c") == code);
    CHECK(parsed.rels.at("odd").tuples == doc.rels.at("odd").tuples);
    CHECK(support(parsed) == IndexSet{3});
}

TEST_CASE("extension verification") {
    Multiforcing p({{0, {LargeTree::cohen()}}, {1, {LargeTree::cohen()}}});

    MExtensionBundle identity;
    auto report = verify_mextension(p, p, identity);
    CHECK(report.all());

    // richer Q: the doubled pair refines Cohen and is finitely covered
    Multiforcing q({{0, {LargeTree::cohen(), LargeTree(b(""), {BitPair{b("00"), b("10")}})}},
                    {1, {LargeTree::cohen()}}});
    CHECK(verify_mextension(p, q, identity).all());

    // mismatched bases fail clause (A)
    Multiforcing narrow({{0, {LargeTree::cohen()}}});
    CHECK_FALSE(verify_mextension(p, narrow, identity).a.pass);

    // a (C) witness that is not below its multitree
    MExtensionBundle bad;
    MExtensionBundle::CWitness cw;
    cw.t = Multitree({{0, LargeTree::around(b("0"))}});
    cw.s = Multitree({{0, LargeTree::around(b("1"))}});
    bad.c_witnesses.push_back(cw);
    CHECK_FALSE(verify_mextension(p, p, bad).c.pass);

    // a (D) witness whose image lands inside Q(ξ)
    MExtensionBundle hit;
    MExtensionBundle::DWitness dw;
    dw.t = Multitree({{0, LargeTree::cohen()}});
    dw.s = Multitree({{0, LargeTree::around(b("0"))}});
    dw.xi = 0;
    dw.code = code_from_table({0}, 1, 1, [](const BrickPoint& x) { return x.at(0); });
    dw.branch = 2;
    hit.d_witnesses.push_back(dw);
    auto hit_report = verify_mextension(p, p, hit);
    CHECK_FALSE(hit_report.d.pass);

    // the same witness passes as a shifted-copy claim
    hit.d_witnesses[0].branch = 1;
    CHECK(verify_mextension(p, p, hit).all());

    // malformed: witness outside MT(Q)
    MExtensionBundle malformed;
    MExtensionBundle::CWitness mw;
    mw.t = Multitree({{0, LargeTree::cohen()}});
    mw.s = Multitree({{0, LargeTree(b(""), {BitPair{b("00"), b("10")}})}});
    malformed.c_witnesses.push_back(mw);
    CHECK_THROWS_AS(verify_mextension(p, p, malformed), CalcError);
}
