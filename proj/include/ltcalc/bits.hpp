#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ltcalc/errors.hpp"

namespace ltcalc {

// A finite 0/1 string. Doubles as a dyadic string and as a finite-depth
// point prefix; the operations below spell out which contract applies.
class Bits {
public:
    Bits() = default;
    explicit Bits(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {}

    // Parses "0101"; the empty string parses to the empty string Λ.
    static Bits parse(std::string_view text);
    static Bits zeros(std::size_t n) { return Bits(std::vector<std::uint8_t>(n, 0)); }
    static Bits one(int bit) { return Bits({static_cast<std::uint8_t>(bit & 1)}); }

    std::size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }
    int at(std::size_t i) const { return bits_[i]; }

    void push_back(int bit) { bits_.push_back(static_cast<std::uint8_t>(bit & 1)); }

    Bits concat(const Bits& tail) const;
    Bits prefix(std::size_t n) const;
    Bits suffix_from(std::size_t pos) const;

    // s ⊆ t: t extends this (including equality).
    bool prefix_of(const Bits& t) const;
    // One of the two is a prefix of the other.
    bool comparable(const Bits& t) const { return prefix_of(t) || t.prefix_of(*this); }

    std::string str() const;

    auto operator<=>(const Bits&) const = default;

    // Length-lexicographic order, used wherever a deterministic first
    // candidate is needed.
    static bool len_lex_less(const Bits& a, const Bits& b);

private:
    std::vector<std::uint8_t> bits_;
};

// s·t: bitwise mod-2 addition on the overlap; length of the result is lh(t).
// When lh(s) > lh(t) the action uses s restricted to lh(t).
Bits act_on_string(const Bits& s, const Bits& t);

// s·x for a point prefix x. Requires lh(x) ≥ lh(s); the flip must land
// entirely inside the known prefix.
Bits act_on_point(const Bits& s, const Bits& x);

// The minimal witness s with y = s·x on the common horizon: xor the two
// prefixes and trim trailing zeros. Requires lh(x) = lh(y). At finite
// horizon a witness always exists; whether the underlying points are
// E₀-equivalent is the caller's contract.
Bits e0_witness(const Bits& x, const Bits& y);

// Enumerates 2^n in lexicographic order.
std::vector<Bits> all_strings(std::size_t n);
// Enumerates 2^{≤n} in length-lexicographic order (Λ first).
std::vector<Bits> all_strings_upto(std::size_t n);

}  // namespace ltcalc
