#include "ltcalc/bits.hpp"

#include <algorithm>

namespace ltcalc {

Bits Bits::parse(std::string_view text) {
    std::vector<std::uint8_t> v;
    v.reserve(text.size());
    for (char c : text) {
        if (c == '0')
            v.push_back(0);
        else if (c == '1')
            v.push_back(1);
        else
            fail(Errc::ParseError, "bit string may contain only '0'/'1', got '" + std::string(1, c) + "'");
    }
    return Bits(std::move(v));
}

Bits Bits::concat(const Bits& tail) const {
    std::vector<std::uint8_t> v = bits_;
    v.insert(v.end(), tail.bits_.begin(), tail.bits_.end());
    return Bits(std::move(v));
}

Bits Bits::prefix(std::size_t n) const {
    if (n >= size()) return *this;
    return Bits(std::vector<std::uint8_t>(bits_.begin(), bits_.begin() + static_cast<long>(n)));
}

Bits Bits::suffix_from(std::size_t pos) const {
    if (pos >= size()) return Bits();
    return Bits(std::vector<std::uint8_t>(bits_.begin() + static_cast<long>(pos), bits_.end()));
}

bool Bits::prefix_of(const Bits& t) const {
    if (size() > t.size()) return false;
    return std::equal(bits_.begin(), bits_.end(), t.bits_.begin());
}

std::string Bits::str() const {
    std::string s;
    s.reserve(size());
    for (auto b : bits_) s.push_back(b ? '1' : '0');
    return s;
}

bool Bits::len_lex_less(const Bits& a, const Bits& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.bits_ < b.bits_;
}

Bits act_on_string(const Bits& s, const Bits& t) {
    std::vector<std::uint8_t> v;
    v.reserve(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        int bit = t.at(k);
        if (k < s.size()) bit ^= s.at(k);
        v.push_back(static_cast<std::uint8_t>(bit));
    }
    return Bits(std::move(v));
}

Bits act_on_point(const Bits& s, const Bits& x) {
    if (x.size() < s.size())
        fail(Errc::InsufficientDepth,
             "point prefix of length " + std::to_string(x.size()) +
                 " cannot absorb an action of length " + std::to_string(s.size()));
    return act_on_string(s, x);
}

Bits e0_witness(const Bits& x, const Bits& y) {
    if (x.size() != y.size())
        fail(Errc::LengthMismatch, "e0_witness requires equal-length prefixes, got " +
                                       std::to_string(x.size()) + " and " + std::to_string(y.size()));
    std::size_t last = 0;  // one past the last disagreement
    for (std::size_t k = 0; k < x.size(); ++k)
        if (x.at(k) != y.at(k)) last = k + 1;
    Bits s;
    for (std::size_t k = 0; k < last; ++k) s.push_back(x.at(k) ^ y.at(k));
    return s;
}

std::vector<Bits> all_strings(std::size_t n) {
    std::vector<Bits> out;
    out.reserve(std::size_t{1} << n);
    for (std::size_t code = 0; code < (std::size_t{1} << n); ++code) {
        Bits b;
        for (std::size_t k = 0; k < n; ++k) b.push_back(static_cast<int>((code >> (n - 1 - k)) & 1));
        out.push_back(std::move(b));
    }
    return out;
}

std::vector<Bits> all_strings_upto(std::size_t n) {
    std::vector<Bits> out;
    for (std::size_t len = 0; len <= n; ++len) {
        auto layer = all_strings(len);
        out.insert(out.end(), layer.begin(), layer.end());
    }
    return out;
}

}  // namespace ltcalc
