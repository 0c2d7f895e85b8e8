#include "doctest.h"

#include "ltcalc/bits.hpp"

using namespace ltcalc;

namespace {
Bits b(const char* s) { return Bits::parse(s); }
}

TEST_CASE("action of a string on a string") {
    CHECK(act_on_string(b(""), b("110")) == b("110"));
    CHECK(act_on_string(b("01"), b("110")) == b("100"));
    // longer s acts through its restriction
    CHECK(act_on_string(b("111"), b("10")) == b("01"));
    CHECK(act_on_string(b("11"), b("")) == b(""));
}

TEST_CASE("action of a string on a point prefix") {
    CHECK(act_on_point(b("11"), b("0101")) == b("1001"));
    CHECK(act_on_point(b(""), b("0")) == b("0"));
    CHECK_THROWS_AS(act_on_point(b("1"), b("")), CalcError);
    try {
        act_on_point(b("1"), b(""));
    } catch (const CalcError& e) {
        CHECK(e.code() == Errc::InsufficientDepth);
    }
}

TEST_CASE("e0 witness") {
    CHECK(e0_witness(b("0101"), b("0101")) == b(""));
    CHECK(e0_witness(b("0101"), b("1001")) == b("11"));
    CHECK_THROWS_AS(e0_witness(b("01"), b("011")), CalcError);
}

TEST_CASE("involution and length preservation") {
    for (std::size_t ls = 0; ls <= 4; ++ls)
        for (const Bits& s : all_strings(ls))
            for (std::size_t lt = 0; lt <= 4; ++lt)
                for (const Bits& t : all_strings(lt)) {
                    Bits st = act_on_string(s, t);
                    CHECK(st.size() == t.size());
                    CHECK(act_on_string(s, st) == t);
                }
}

TEST_CASE("e0 witness acts back, exhaustively to length 8") {
    for (std::size_t n = 0; n <= 8; ++n)
        for (const Bits& x : all_strings(n))
            for (const Bits& y : all_strings(n)) {
                Bits s = e0_witness(x, y);
                CHECK(act_on_point(s, x) == y);
                // minimality: the witness never ends in 0
                if (!s.empty()) CHECK(s.at(s.size() - 1) == 1);
            }
}

TEST_CASE("length-lex enumeration starts at the empty string") {
    auto all = all_strings_upto(2);
    REQUIRE(all.size() == 7);
    CHECK(all[0] == b(""));
    CHECK(all[1] == b("0"));
    CHECK(all[2] == b("1"));
    CHECK(all[3] == b("00"));
}
