#include "doctest.h"

#include "ltcalc/code.hpp"

using namespace ltcalc;

namespace {

Bits b(const char* s) { return Bits::parse(s); }

Multitree mt(std::map<int, LargeTree> entries) { return Multitree(std::move(entries)); }

Multitree cohen_cell(std::map<int, const char*> stems) {
    std::map<int, LargeTree> entries;
    for (auto [xi, stem] : stems) entries.emplace(xi, LargeTree::around(b(stem)));
    return Multitree(std::move(entries));
}

// bit k of the output copies bit k of coordinate ξ
CcfCode coordinate_code(const IndexSet& base, int xi, std::size_t k_bits) {
    return code_from_table(base, k_bits, k_bits,
                           [xi](const BrickPoint& x) { return x.at(xi); });
}

CcfCode constant_code(const IndexSet& base, const Bits& value) {
    return code_from_table(base, 1, value.size(), [value](const BrickPoint&) { return value; });
}

Multitree full_brick(const IndexSet& base) {
    std::map<int, LargeTree> entries;
    for (int xi : base) entries.emplace(xi, LargeTree::cohen());
    return Multitree(std::move(entries));
}

}  // namespace

TEST_CASE("code validation") {
    CcfCode identity({0}, {CcfCode::Cell{{cohen_cell({{0, "0"}})}, {cohen_cell({{0, "1"}})}}});
    CHECK(validate_code(identity).valid);

    CcfCode uncovered({0}, {CcfCode::Cell{{cohen_cell({{0, "0"}})}, {}}});
    auto v1 = validate_code(uncovered);
    CHECK_FALSE(v1.valid);
    CHECK(v1.cell == 0);
    CHECK(v1.reason.find("uncovered") != std::string::npos);

    CcfCode overlapping({0}, {CcfCode::Cell{{cohen_cell({{0, "0"}})},
                                            {cohen_cell({{0, "0"}})}}});
    auto v2 = validate_code(overlapping);
    CHECK_FALSE(v2.valid);
    CHECK(v2.reason.find("overlapping") != std::string::npos);

    // members must be Cohen multitrees
    CHECK_THROWS_AS(CcfCode({0}, {CcfCode::Cell{
                                {Multitree({{0, LargeTree(b(""), {BitPair{b("00"), b("10")}})}})},
                                {}}}),
                    CalcError);
}

TEST_CASE("code evaluation") {
    CcfCode identity({0}, {CcfCode::Cell{{cohen_cell({{0, "0"}})}, {cohen_cell({{0, "1"}})}}});
    CHECK(eval_code(identity, BrickPoint{{{0, b("10")}}}) == b("1"));
    CHECK(eval_code(identity, BrickPoint{{{0, b("01")}}}) == b("0"));

    // whole-space cell on one side gives a constant bit
    CcfCode constant({0}, {CcfCode::Cell{{}, {cohen_cell({})}}});
    CHECK(eval_code(constant, BrickPoint{{{0, b("0")}}}) == b("1"));

    CHECK_THROWS_AS(eval_code(identity, BrickPoint{{{0, b("")}}}), CalcError);
}

TEST_CASE("tabulated codes reproduce their tables") {
    IndexSet base{0, 1};
    CcfCode f = code_from_table(base, 2, 3, [](const BrickPoint& x) {
        Bits out;
        out.push_back(x.at(0).at(0) ^ x.at(1).at(1));
        out.push_back(x.at(0).at(1));
        out.push_back(1);
        return out;
    });
    CHECK(validate_code(f).valid);
    CHECK(f.max_dependence_depth() == 2);
    BrickPoint x{{{0, b("01")}, {1, b("11")}}};
    CHECK(eval_code(f, x) == b("111"));
    BrickPoint y{{{0, b("10")}, {1, b("00")}}};
    CHECK(eval_code(f, y) == b("101"));
}

TEST_CASE("reduction to an index set") {
    IndexSet base{0, 1};
    Multitree t = full_brick(base);
    CcfCode f = coordinate_code(base, 0, 2);

    CHECK(reduced_to_set(f, base, t, 2));
    CHECK(reduced_to_set(f, {0}, t, 2));
    CHECK_FALSE(reduced_to_set(f, {1}, t, 2));

    CcfCode c = constant_code(base, b("10"));
    CHECK(reduced_to_set(c, {}, t, 2));
}

TEST_CASE("reduction to a map") {
    IndexSet base{0, 1};
    Multitree t = full_brick(base);
    CcfCode f = coordinate_code(base, 0, 2);
    CcfCode g = coordinate_code(base, 1, 2);
    CcfCode c = constant_code(base, b("01"));

    CHECK(reduced_to_map(f, f, t, 2));
    CHECK(reduced_to_map(c, g, t, 2));
    CHECK_FALSE(reduced_to_map(f, g, t, 2));
}

TEST_CASE("intersection of reduction sets (two-set instance)") {
    IndexSet base{0, 1, 2};
    Multitree t = full_brick(base);
    // depends only on coordinate 1 = {0,1} ∩ {1,2}
    CcfCode f = coordinate_code(base, 1, 2);
    CHECK(reduced_to_set(f, {0, 1}, t, 2));
    CHECK(reduced_to_set(f, {1, 2}, t, 2));
    CHECK(reduced_to_set(f, {1}, t, 2));
}

TEST_CASE("captures") {
    IndexSet base{0, 1};
    Multitree t = full_brick(base);
    CcfCode f = coordinate_code(base, 0, 2);
    CHECK(captures(f, 0, t, 2));
    CHECK_FALSE(captures(f, 1, t, 2));
    CcfCode c = constant_code(base, b("1"));
    CHECK_FALSE(captures(c, 0, t, 1));
    CHECK_THROWS_AS(captures(f, 7, t, 2), CalcError);
}

TEST_CASE("simplicity") {
    IndexSet base{0};
    Multitree t = full_brick(base);
    CcfCode ident = coordinate_code(base, 0, 2);
    auto s1 = is_simple(ident, 0, t, 2);
    REQUIRE(s1.has_value());
    CHECK(*s1 == b(""));

    CcfCode flipped = code_from_table(base, 2, 2, [](const BrickPoint& x) {
        Bits out;
        out.push_back(1 ^ x.at(0).at(0));
        out.push_back(x.at(0).at(1));
        return out;
    });
    auto s2 = is_simple(flipped, 0, t, 2);
    REQUIRE(s2.has_value());
    CHECK(*s2 == b("1"));

    CHECK_FALSE(is_simple(constant_code(base, b("11")), 0, t, 2).has_value());
}

TEST_CASE("good refinement and m-goodness") {
    IndexSet base{0};
    Scheduler sched(base);
    Multiforcing p({{0, {LargeTree::cohen()}}});
    LazySubmf submf = LazySubmf::of(p);
    Multitree t = full_brick(base);

    CcfCode f = coordinate_code(base, 0, 3);
    CcfCode g = constant_code(base, b("101"));

    Multitree zero = make_zero_good(t, f, g, submf, sched, 3);
    CHECK(is_m_good(zero, 0, f, g, submf, sched, 3));

    Multitree one = good_refine(zero, 0, f, g, submf, sched, 3);
    CHECK(is_m_good(one, 1, f, g, submf, sched, 3));
    CHECK(mt_refines(one, zero, 1, sched));
}

TEST_CASE("dichotomy verdicts verify themselves") {
    IndexSet base{0};
    Scheduler sched(base);
    LazySubmf submf = LazySubmf::of(Multiforcing({{0, {LargeTree::cohen()}}}));
    Multitree t = full_brick(base);

    CcfCode f = coordinate_code(base, 0, 3);
    CcfCode g = constant_code(base, b("101"));

    // f a coordinate stream, g constant: f captures the coordinate. The
    // search budget stays below the horizon so the stream is not pinned.
    Dichotomy cap = classify_dichotomy(t, f, g, submf, sched, 2, 2);
    REQUIRE(cap.kind == Dichotomy::Kind::Captured);
    CHECK(cap.eta == 0);
    CHECK(captures(f, cap.eta, cap.witness, cap.depth));
    CHECK(reduced_to_set(g, {}, cap.witness, cap.depth));

    // f = g is reduced reflexively
    Dichotomy red = classify_dichotomy(t, f, f, submf, sched, 2, 2);
    REQUIRE(red.kind == Dichotomy::Kind::Reduced);
    CHECK(reduced_to_map(f, f, red.witness, red.depth));

    // constant f is reduced to anything
    Dichotomy red2 = classify_dichotomy(t, g, f, submf, sched, 2, 2);
    REQUIRE(red2.kind == Dichotomy::Kind::Reduced);
}

TEST_CASE("separating the image from a tree") {
    IndexSet base{0};
    Scheduler sched(base);
    LazySubmf submf = LazySubmf::of(Multiforcing({{0, {LargeTree::cohen()}}}));
    ForcingSet coh = ForcingSet::cohen();

    // constant map whose value already avoids the tree: nothing moves
    CcfCode c = constant_code(base, b("11"));
    Multitree t = mt({{0, LargeTree::around(b("0"))}});
    auto [t1, u1] = separate_image(t, 0, LargeTree::around(b("0")), 0, c, coh, submf, sched);
    CHECK(t1 == t);
    CHECK(u1 == LargeTree::around(b("0")));

    // coordinate copy against the full tree: both sides shrink
    CcfCode f = coordinate_code(base, 0, 2);
    Multitree full = full_brick(base);
    auto [t2, u2] = separate_image(full, 0, LargeTree::cohen(), 0, f, coh, submf, sched);
    for (const BrickPoint& x : brick_quotient(t2, 2)) CHECK_FALSE(u2.member(eval_code(f, x)));

    // a constant value sitting inside every refinement of U is inseparable
    CHECK_THROWS_AS(separate_image(full, 0, LargeTree::around(b("00")), 0,
                                   constant_code(base, b("00")), coh, submf, sched),
                    CalcError);
}

TEST_CASE("separating the image from a coordinate") {
    IndexSet base{0, 1};
    Scheduler sched(base);
    LazySubmf submf = LazySubmf::of(Multiforcing(
        {{0, {LargeTree::cohen()}}, {1, {LargeTree::cohen()}}}));
    Multitree t = full_brick(base);

    // f copies the other coordinate, so it is nowhere simple for ξ = 0
    CcfCode f = coordinate_code(base, 1, 2);
    Multitree out = separate_diagonal(t, 0, 0, f, submf, sched);
    for (const BrickPoint& x : brick_quotient(out, 2))
        CHECK_FALSE(out.at(0).member(eval_code(f, x)));

    // a shifted copy of the coordinate itself is rejected up front
    CcfCode mirror = code_from_table(base, 2, 2, [](const BrickPoint& x) {
        Bits out2;
        out2.push_back(1 ^ x.at(0).at(0));
        out2.push_back(1 ^ x.at(0).at(1));
        return out2;
    });
    CHECK_THROWS_AS(separate_diagonal(t, 0, 0, mirror, submf, sched), CalcError);
}
