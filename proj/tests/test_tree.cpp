#include "doctest.h"

#include <algorithm>

#include "ltcalc/tree.hpp"

using namespace ltcalc;

namespace {

Bits b(const char* s) { return Bits::parse(s); }

LargeTree demo_tree() {
    // stem "1", pairs ("0","1") and ("01","11"); the first pair is Cohen but
    // sits before a longer one, so it stays explicit.
    return LargeTree(b("1"), {BitPair{b("0"), b("1")}, BitPair{b("01"), b("11")}});
}

// Reference node enumeration straight from the branch form
// r⌢q_0^{i_0}⌢q_1^{i_1}⌢…, used as the independent oracle below.
std::vector<Bits> oracle_nodes(const LargeTree& t, std::size_t depth) {
    std::vector<Bits> branches{t.stem()};
    for (std::size_t k = 0; t.spl(k) < depth; ++k) {
        std::vector<Bits> next;
        for (const Bits& br : branches)
            for (int i = 0; i < 2; ++i) next.push_back(br.concat(t.pair(k).q(i)));
        branches = std::move(next);
    }
    std::vector<Bits> nodes;
    for (const Bits& br : branches)
        if (br.size() >= depth) nodes.push_back(br.prefix(depth));
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

}  // namespace

TEST_CASE("construction canonicalizes trailing Cohen pairs") {
    LargeTree t(b("1"), {BitPair{b("0"), b("1")}});
    CHECK(t == LargeTree::around(b("1")));
    CHECK(demo_tree().explicit_pair_count() == 2);
    CHECK_THROWS_AS(LargeTree(b(""), {BitPair{b("1"), b("0")}}), CalcError);
    CHECK_THROWS_AS(LargeTree(b(""), {BitPair{b("01"), b("1")}}), CalcError);
}

TEST_CASE("membership") {
    LargeTree t01 = LargeTree::around(b("01"));
    CHECK(t01.member(b("0")));
    CHECK_FALSE(t01.member(b("1")));
    CHECK(t01.member(b("")));
    CHECK(t01.member(b("0110")));

    LargeTree t = demo_tree();
    CHECK(t.member(b("1001")));  // "1"⌢"0"⌢"01"
    CHECK_FALSE(t.member(b("1000")));
    CHECK_FALSE(t.member(b("0")));
}

TEST_CASE("node enumeration agrees with the branch form") {
    for (const LargeTree& t :
         {demo_tree(), LargeTree::cohen(), LargeTree::around(b("01")),
          LargeTree(b(""), {BitPair{b("00"), b("10")}, BitPair{b("0"), b("1")},
                            BitPair{b("011"), b("100")}})}) {
        for (std::size_t d = 0; d <= t.spl(3) + 2; ++d) {
            CHECK(t.nodes_at(d) == oracle_nodes(t, d));
        }
    }
}

TEST_CASE("splitting levels") {
    CHECK(LargeTree::around(b("011")).spl(4) == 7);
    CHECK(demo_tree().spl(2) == 4);
    CHECK(LargeTree::cohen().spl(0) == 0);
}

TEST_CASE("split") {
    LargeTree t = demo_tree();
    CHECK(split(t, b("")) == t);
    CHECK(split(t, b("0")) == LargeTree(b("10"), {BitPair{b("01"), b("11")}}));
    CHECK(split(LargeTree::cohen(), b("0110")) == LargeTree::around(b("0110")));
}

TEST_CASE("stem of split") {
    LargeTree t = demo_tree();
    CHECK(stem_of_split(t, b("")) == t.stem());
    CHECK(stem_of_split(t, b("01")) == b("1011"));
    CHECK(stem_of_split(LargeTree::cohen(), b("10")) == b("10"));
}

TEST_CASE("truncate") {
    LargeTree t = demo_tree();
    auto at_stem = truncate(t, t.stem());
    CHECK(at_stem.tree == t);
    CHECK(at_stem.selector == b(""));

    auto mid = truncate(t, b("10"));
    CHECK(mid.selector == b("0"));
    CHECK(mid.tree == split(t, b("0")));

    CHECK_THROWS_AS(truncate(LargeTree::around(b("01")), b("11")), CalcError);
}

TEST_CASE("roundtrip through truncate reproduces the truncated subtree") {
    for (const LargeTree& t : {demo_tree(), LargeTree(b(""), {BitPair{b("00"), b("11")}})}) {
        std::size_t deep = t.spl(3);
        for (const Bits& u : t.nodes_upto(deep)) {
            auto tr = truncate(t, u);
            // T↾_u as a node set, from first principles
            for (std::size_t d = 0; d <= deep + 2; ++d) {
                std::vector<Bits> expected;
                for (const Bits& node : t.nodes_at(d))
                    if (node.comparable(u)) expected.push_back(node);
                CHECK(tr.tree.nodes_at(d) == expected);
            }
        }
    }
}

TEST_CASE("action on trees") {
    LargeTree t = demo_tree();
    CHECK(act_on_tree(b(""), t) == t);
    CHECK(act_on_tree(b("01"), LargeTree::around(b("01"))) == LargeTree::around(b("00")));
    // flipping inside a pair swaps its arms
    LargeTree wide(b("1"), {BitPair{b("00"), b("11")}});
    CHECK(act_on_tree(b("11"), wide) == LargeTree(b("0"), {BitPair{b("01"), b("10")}}));
}

TEST_CASE("action on trees matches the pointwise action on nodes") {
    for (const LargeTree& t : {demo_tree(), LargeTree(b("0"), {BitPair{b("010"), b("111")}})}) {
        for (const Bits& sigma : all_strings_upto(4)) {
            LargeTree image = act_on_tree(sigma, t);
            for (std::size_t d = 0; d <= t.spl(2) + 1; ++d) {
                std::vector<Bits> moved;
                for (const Bits& node : t.nodes_at(d)) moved.push_back(act_on_string(sigma, node));
                std::sort(moved.begin(), moved.end());
                CHECK(image.nodes_at(d) == moved);
            }
        }
    }
}

TEST_CASE("shift between splits") {
    LargeTree t = demo_tree();
    CHECK(shift_between_splits(t, b("0"), b("0")) == Bits::zeros(2));
    CHECK(shift_between_splits(t, b("0"), b("1")) == b("01"));
    CHECK(act_on_tree(b("01"), split(t, b("1"))) == split(t, b("0")));
    CHECK(shift_between_splits(LargeTree::cohen(), b("00"), b("11")) == b("11"));
    CHECK_THROWS_AS(shift_between_splits(t, b("0"), b("10")), CalcError);
}

TEST_CASE("subtree decision agrees with node-set inclusion") {
    std::vector<LargeTree> pool{
        LargeTree::cohen(),
        LargeTree::around(b("0")),
        LargeTree::around(b("01")),
        demo_tree(),
        LargeTree(b(""), {BitPair{b("01"), b("11")}}),
        LargeTree(b("0"), {BitPair{b("00"), b("10")}}),
        LargeTree(b(""), {BitPair{b("00"), b("11")}, BitPair{b("01"), b("10")}}),
    };
    for (const LargeTree& r : pool)
        for (const LargeTree& t : pool) {
            std::size_t d = std::max(r.explicit_end(), t.explicit_end());
            bool expected = true;
            for (const Bits& node : r.nodes_upto(d))
                if (!t.member(node)) {
                    expected = false;
                    break;
                }
            CHECK(is_subtree(r, t) == expected);
        }
}

TEST_CASE("refinement") {
    LargeTree t = demo_tree();
    for (std::size_t n = 0; n <= 4; ++n) CHECK(refines(t, t, n));
    CHECK(refines(LargeTree(b("1"), {BitPair{b("01"), b("10")}}), LargeTree::around(b("1")), 1));
    CHECK_FALSE(refines(LargeTree::around(b("0")), LargeTree::around(b("1")), 0));
}

TEST_CASE("refinement matches the splitwise definition") {
    LargeTree t = demo_tree();
    std::vector<LargeTree> candidates{
        t,
        LargeTree(b("1"), {BitPair{b("0"), b("1")}, BitPair{b("011"), b("110")}}),
        LargeTree(b("1"), {BitPair{b("00"), b("10")}, BitPair{b("01"), b("11")}}),
        LargeTree(b("1"), {BitPair{b("0"), b("1")}, BitPair{b("01"), b("11")},
                           BitPair{b("00"), b("10")}}),
        LargeTree::around(b("1")),
        LargeTree::around(b("10")),
    };
    for (const LargeTree& r : candidates)
        for (std::size_t n = 0; n <= 3; ++n) {
            bool expected = true;
            for (const Bits& s : all_strings(n))
                if (!is_subtree(split(r, s), split(t, s))) {
                    expected = false;
                    break;
                }
            CHECK(refines(r, t, n) == expected);
        }
}

TEST_CASE("lemma 5.4 completion") {
    LargeTree t = demo_tree();
    CHECK(lemma54_complete(t, b(""), split(t, b(""))) == t);

    LargeTree completed = lemma54_complete(LargeTree::cohen(), b("0"), LargeTree::around(b("01")));
    CHECK(completed == LargeTree(b(""), {BitPair{b("01"), b("11")}}));

    CHECK_THROWS_AS(lemma54_complete(t, b("0"), t), CalcError);

    // clopen clause: completing with the full split returns T itself
    CHECK(lemma54_complete(t, b("10"), split(t, b("10"))) == t);
}

TEST_CASE("lemma 5.5 join") {
    LargeTree joined = lemma55_join(LargeTree::cohen(), b(""), b(""), LargeTree::around(b("01")),
                                    LargeTree::around(b("11")), 6);
    CHECK(refines(joined, LargeTree::cohen(), 1));
    CHECK(is_subtree(split(joined, b("0")), LargeTree::around(b("01"))));
    CHECK(is_subtree(split(joined, b("1")), LargeTree::around(b("11"))));

    LargeTree joined2 = lemma55_join(LargeTree::cohen(), b(""), b(""), LargeTree::around(b("0")),
                                     LargeTree::around(b("1")), 6);
    CHECK(refines(joined2, LargeTree::cohen(), 1));

    CHECK_THROWS_AS(lemma55_join(LargeTree::cohen(), b("0"), b("10"), LargeTree::cohen(),
                                 LargeTree::cohen(), 2),
                    CalcError);
}

TEST_CASE("fusion") {
    LargeTree t = demo_tree();
    std::vector<LargeTree> constant{t, t, t, t};
    CHECK(fuse(constant, 4) == t);

    // chain that extends pair n at step n+1
    std::vector<LargeTree> chain{LargeTree::cohen()};
    for (std::size_t n = 0; n < 3; ++n) {
        const LargeTree& prev = chain.back();
        Bits gate = Bits::zeros(n + 1);
        LargeTree u = split(prev, gate);
        u = truncate(u, u.stem().concat(b("0"))).tree;  // lengthen the stem below the gate
        chain.push_back(lemma54_complete(prev, gate, u));
    }
    LargeTree fused = fuse(chain, 4);
    for (std::size_t n = 0; n + 1 < chain.size(); ++n) {
        CHECK(fused.pair(n) == chain[n + 1].pair(n));
        CHECK(refines(fused, chain[n], n + 1));
    }

    std::vector<LargeTree> broken{t, LargeTree::around(b("0"))};
    CHECK_THROWS_AS(fuse(broken, 2), CalcError);
}

TEST_CASE("forcing membership") {
    ForcingSet coh = ForcingSet::cohen();
    CHECK(coh.contains(LargeTree::around(b("0101"))));
    CHECK(coh.contains(LargeTree::cohen()));
    CHECK_FALSE(coh.contains(demo_tree()));

    ForcingSet gen({demo_tree()});
    CHECK(gen.contains(demo_tree()));
    CHECK(gen.contains(split(demo_tree(), b("01"))));
    CHECK(gen.contains(act_on_tree(b("110"), split(demo_tree(), b("1")))));

    ForcingSet below0({LargeTree::around(b("0"))});
    CHECK_FALSE(below0.contains(LargeTree(b(""), {BitPair{b("00"), b("10")}})));
    // the generated forcing is E₀-invariant, so it reaches the other side
    CHECK(below0.contains(LargeTree::around(b("1"))));
}

TEST_CASE("forcing closure laws") {
    ForcingSet gen({demo_tree(), LargeTree::around(b("11"))});
    for (const LargeTree& t : sample_forcing(gen, 2)) {
        for (const Bits& s : all_strings_upto(2)) CHECK(gen.contains(split(t, s)));
        for (const Bits& sigma : all_strings_upto(2)) CHECK(gen.contains(act_on_tree(sigma, t)));
        for (const Bits& u : t.nodes_upto(t.spl(1))) CHECK(gen.contains(truncate(t, u).tree));
    }
}

TEST_CASE("collages") {
    CHECK(is_collage(LargeTree::cohen(), 2, ForcingSet::cohen(), true));
    CHECK(is_collage(demo_tree(), 0, ForcingSet({demo_tree()}), true));
    // splitting once consumes a single long pair, so this is a 1-collage
    LargeTree one_pair(b(""), {BitPair{b("00"), b("11")}});
    CHECK_FALSE(is_collage(one_pair, 0, ForcingSet::cohen(), true));
    CHECK(is_collage(one_pair, 1, ForcingSet::cohen(), true));
    // with a second long pair one split is not enough
    LargeTree two_pairs(b(""), {BitPair{b("00"), b("11")}, BitPair{b("01"), b("10")}});
    CHECK_FALSE(is_collage(two_pairs, 1, ForcingSet::cohen(), true));
    CHECK(is_collage(two_pairs, 2, ForcingSet::cohen(), true));
}

TEST_CASE("finite covering") {
    LargeTree t = demo_tree();
    auto self = covers_fin(t, {t});
    REQUIRE(self.has_value());
    CHECK(*self == std::vector<LargeTree>{t});

    auto pair = covers_fin(LargeTree::cohen(),
                           {LargeTree::around(b("0")), LargeTree::around(b("1"))});
    REQUIRE(pair.has_value());
    CHECK(pair->size() == 2);

    CHECK_FALSE(covers_fin(LargeTree::cohen(), {LargeTree::around(b("0"))}).has_value());
}

TEST_CASE("extension surrogate") {
    ForcingSet coh = ForcingSet::cohen();
    CHECK(is_extension(coh, coh, {}).holds);

    ForcingSet doubled({LargeTree(b(""), {BitPair{b("00"), b("10")}})});
    CHECK(is_extension(coh, doubled, {}).holds);

    // the generated closure of T["0"] is E₀-invariant and lies dense in
    // Cohen's forcing, so the extension relation holds in this direction too
    ForcingSet below0({LargeTree::around(b("0"))});
    CHECK(is_extension(below0, coh, {}).holds);

    // a pre-dense set must actually be pre-dense
    CHECK_THROWS_AS(is_extension(coh, doubled, {{LargeTree::around(b("0101"))}}),
                    CalcError);
    // and a legitimate one passes through
    CHECK(is_extension(coh, doubled, {{LargeTree::around(b("0")), LargeTree::around(b("1"))}})
              .holds);
}
