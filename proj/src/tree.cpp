#include "ltcalc/tree.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <tuple>

namespace ltcalc {

namespace {

// Position along a branch of a tree: inside the stem, inside an explicit
// pair (with the chosen arm), or past the explicit structure where every
// continuation is free. Behaviour from a given state does not depend on
// absolute depth, which makes state pairs memoizable.
struct Cursor {
    enum Phase { Stem, Pair, Free };

    const LargeTree* t;
    Phase phase;
    std::size_t pos = 0;  // offset in stem
    std::size_t k = 0;    // explicit pair index
    std::size_t off = 0;  // offset within the pair
    int arm = 0;          // chosen arm, valid when off > 0

    static Cursor start(const LargeTree& tree) {
        Cursor c{&tree, Stem};
        if (tree.stem().empty()) c.enter_pair(0);
        return c;
    }

    void enter_pair(std::size_t idx) {
        if (idx >= t->explicit_pair_count()) {
            phase = Free;
        } else {
            phase = Pair;
            k = idx;
            off = 0;
        }
    }

    bool allows(int bit) const {
        switch (phase) {
            case Stem: return t->stem().at(pos) == bit;
            case Pair: return off == 0 ? true : t->explicit_pairs()[k].q(arm).at(off) == bit;
            case Free: return true;
        }
        return false;
    }

    // Exactly one of 0/1 when the position is forced, both when splitting.
    std::array<int, 2> allowed_bits(std::size_t& count) const {
        std::array<int, 2> out{0, 1};
        if (phase == Free || (phase == Pair && off == 0)) {
            count = 2;
        } else {
            count = 1;
            out[0] = (phase == Stem) ? t->stem().at(pos) : t->explicit_pairs()[k].q(arm).at(off);
        }
        return out;
    }

    void advance(int bit) {
        switch (phase) {
            case Stem:
                ++pos;
                if (pos == t->stem().size()) enter_pair(0);
                return;
            case Pair: {
                if (off == 0) arm = bit;
                ++off;
                if (off == t->explicit_pairs()[k].length()) enter_pair(k + 1);
                return;
            }
            case Free: return;
        }
    }

    bool free() const { return phase == Free; }

    std::tuple<int, std::size_t, std::size_t, std::size_t, int> key() const {
        return {static_cast<int>(phase), phase == Stem ? pos : 0, phase == Pair ? k : 0,
                phase == Pair ? off : 0, (phase == Pair && off > 0) ? arm : 0};
    }
};

Bits segment(const Bits& s, std::size_t from, std::size_t len) {
    Bits out;
    for (std::size_t i = from; i < from + len && i < s.size(); ++i) out.push_back(s.at(i));
    return out;
}

void enumerate_nodes(Cursor c, Bits& path, std::size_t depth, std::vector<Bits>& out) {
    if (path.size() == depth) {
        out.push_back(path);
        return;
    }
    std::size_t count = 0;
    auto bits = c.allowed_bits(count);
    for (std::size_t i = 0; i < count; ++i) {
        Cursor next = c;
        next.advance(bits[i]);
        path.push_back(bits[i]);
        enumerate_nodes(next, path, depth, out);
        path = path.prefix(path.size() - 1);
    }
}

}  // namespace

LargeTree::LargeTree(Bits stem, std::vector<BitPair> pairs)
    : stem_(std::move(stem)), pairs_(std::move(pairs)) {
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
        const auto& p = pairs_[k];
        if (p.q0.size() != p.q1.size() || p.q0.empty())
            fail(Errc::PreconditionFailed,
                 "pair " + std::to_string(k) + " must have equal positive lengths");
        if (p.q0.at(0) != 0 || p.q1.at(0) != 1)
            fail(Errc::PreconditionFailed,
                 "pair " + std::to_string(k) + " must start with bits 0 and 1");
    }
    while (!pairs_.empty() && pairs_.back().is_cohen()) pairs_.pop_back();
}

BitPair LargeTree::pair(std::size_t k) const {
    if (k < pairs_.size()) return pairs_[k];
    return BitPair{Bits::one(0), Bits::one(1)};
}

std::size_t LargeTree::spl(std::size_t n) const {
    std::size_t level = stem_.size();
    for (std::size_t k = 0; k < n; ++k) level += pair(k).length();
    return level;
}

bool LargeTree::member(const Bits& t) const {
    Cursor c = Cursor::start(*this);
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!c.allows(t.at(i))) return false;
        c.advance(t.at(i));
    }
    return true;
}

std::vector<Bits> LargeTree::nodes_at(std::size_t depth) const {
    std::vector<Bits> out;
    Bits path;
    enumerate_nodes(Cursor::start(*this), path, depth, out);
    return out;
}

std::vector<Bits> LargeTree::nodes_upto(std::size_t depth) const {
    std::vector<Bits> out;
    for (std::size_t d = 0; d <= depth; ++d) {
        auto layer = nodes_at(d);
        out.insert(out.end(), layer.begin(), layer.end());
    }
    return out;
}

LargeTree split(const LargeTree& t, const Bits& s) {
    Bits stem = stem_of_split(t, s);
    std::vector<BitPair> rest;
    if (s.size() < t.explicit_pair_count())
        rest.assign(t.explicit_pairs().begin() + static_cast<long>(s.size()),
                    t.explicit_pairs().end());
    return LargeTree(std::move(stem), std::move(rest));
}

Bits stem_of_split(const LargeTree& t, const Bits& s) {
    Bits stem = t.stem();
    for (std::size_t k = 0; k < s.size(); ++k) stem = stem.concat(t.pair(k).q(s.at(k)));
    return stem;
}

Truncation truncate(const LargeTree& t, const Bits& u) {
    if (!t.member(u)) fail(Errc::NotANode, "truncation point is not a node of the tree");
    Bits selector;
    for (std::size_t k = 0; t.spl(k) < u.size(); ++k) selector.push_back(u.at(t.spl(k)));
    return Truncation{split(t, selector), std::move(selector)};
}

LargeTree act_on_tree(const Bits& sigma, const LargeTree& t) {
    Bits stem = act_on_string(sigma, t.stem());
    std::vector<BitPair> pairs;
    pairs.reserve(t.explicit_pair_count());
    for (std::size_t k = 0; k < t.explicit_pair_count(); ++k) {
        const BitPair& p = t.explicit_pairs()[k];
        Bits mask = segment(sigma, t.spl(k), p.length());
        Bits a = act_on_string(mask, p.q0);
        Bits b = act_on_string(mask, p.q1);
        if (a.at(0) == 0)
            pairs.push_back(BitPair{std::move(a), std::move(b)});
        else
            pairs.push_back(BitPair{std::move(b), std::move(a)});
    }
    return LargeTree(std::move(stem), std::move(pairs));
}

Bits shift_between_splits(const LargeTree& r, const Bits& s, const Bits& t) {
    if (s.size() != t.size())
        fail(Errc::LengthMismatch, "shift_between_splits requires equally long selectors");
    return act_on_string(stem_of_split(r, s), stem_of_split(r, t));
}

std::optional<Bits> shift_witness(const LargeTree& r, const LargeTree& s) {
    if (r.stem().size() != s.stem().size()) return std::nullopt;
    if (r.explicit_pair_count() != s.explicit_pair_count()) return std::nullopt;
    Bits sigma = act_on_string(r.stem(), s.stem());
    for (std::size_t k = 0; k < r.explicit_pair_count(); ++k) {
        const BitPair& a = r.explicit_pairs()[k];
        const BitPair& b = s.explicit_pairs()[k];
        if (a.length() != b.length()) return std::nullopt;
        Bits keep = act_on_string(a.q0, b.q0);
        Bits swap = act_on_string(a.q1, b.q0);
        if (act_on_string(keep, a.q1) == b.q1) {
            sigma = sigma.concat(keep);
        } else if (act_on_string(swap, a.q0) == b.q1) {
            sigma = sigma.concat(swap);
        } else {
            return std::nullopt;
        }
    }
    ensure(act_on_tree(sigma, r) == s, Errc::InternalCheckFailed,
           "shift_witness reconstruction does not act back");
    return sigma;
}

bool is_subtree(const LargeTree& r, const LargeTree& t) {
    using Key = std::pair<decltype(Cursor::start(r).key()), decltype(Cursor::start(t).key())>;
    std::set<Key> visited;
    // Reachability over the product of the two branch machines: reject as
    // soon as r allows a bit t forbids. A free×free state is absorbing.
    auto walk = [&](auto&& self, Cursor cr, Cursor ct) -> bool {
        if (cr.free() && ct.free()) return true;
        if (!visited.insert({cr.key(), ct.key()}).second) return true;
        std::size_t count = 0;
        auto bits = cr.allowed_bits(count);
        for (std::size_t i = 0; i < count; ++i) {
            int bit = bits[i];
            if (!ct.allows(bit)) return false;
            Cursor nr = cr, nt = ct;
            nr.advance(bit);
            nt.advance(bit);
            if (!self(self, nr, nt)) return false;
        }
        return true;
    };
    return walk(walk, Cursor::start(r), Cursor::start(t));
}

bool refines(const LargeTree& r, const LargeTree& t, std::size_t n) {
    if (n == 0) return is_subtree(r, t);
    if (r.stem() != t.stem()) return false;
    for (std::size_t k = 0; k + 1 < n; ++k)
        if (r.pair(k) != t.pair(k)) return false;
    BitPair rp = r.pair(n - 1), tp = t.pair(n - 1);
    if (!tp.q0.prefix_of(rp.q0) || !tp.q1.prefix_of(rp.q1)) return false;
    return is_subtree(r, t);
}

LargeTree lemma54_complete(const LargeTree& t, const Bits& s0, const LargeTree& u) {
    if (!is_subtree(u, split(t, s0)))
        fail(Errc::NotASubtree, "lemma54_complete requires U ⊆ T(→s0)");
    std::size_t n = s0.size();
    if (n == 0) return u;
    // stem(U) extends u[s0,T]; the overhang δ is grafted onto pair n−1 and
    // U's own pairs take over from pair n on.
    Bits gate = stem_of_split(t, s0);
    Bits delta = u.stem().suffix_from(gate.size());
    Bits stem = t.stem();
    std::vector<BitPair> pairs;
    for (std::size_t k = 0; k + 1 < n; ++k) pairs.push_back(t.pair(k));
    BitPair last = t.pair(n - 1);
    pairs.push_back(BitPair{last.q0.concat(delta), last.q1.concat(delta)});
    for (const auto& p : u.explicit_pairs()) pairs.push_back(p);
    LargeTree out(std::move(stem), std::move(pairs));
    ensure(refines(out, t, n), Errc::InternalCheckFailed, "lemma54_complete: T' ⊆ₙ T failed");
    ensure(split(out, s0) == u, Errc::InternalCheckFailed, "lemma54_complete: T'(→s0) ≠ U");
    return out;
}

LargeTree lemma55_join(const LargeTree& t, const Bits& s0, const Bits& s1, const LargeTree& u,
                       const LargeTree& v, std::size_t depth) {
    if (s0.size() != s1.size())
        fail(Errc::PreconditionFailed, "lemma55_join requires lh(s0) = lh(s1)");
    Bits gate0 = s0.concat(Bits::one(0));
    Bits gate1 = s1.concat(Bits::one(1));
    if (!is_subtree(u, split(t, gate0)))
        fail(Errc::PreconditionFailed, "lemma55_join requires U ⊆ T(→s0⌢0)");
    if (!is_subtree(v, split(t, gate1)))
        fail(Errc::PreconditionFailed, "lemma55_join requires V ⊆ T(→s1⌢1)");
    std::size_t n = s0.size();
    auto finish = [&](const LargeTree& candidate) -> std::optional<LargeTree> {
        if (!refines(candidate, t, n + 1)) return std::nullopt;
        if (!is_subtree(split(candidate, gate0), u)) return std::nullopt;
        if (!is_subtree(split(candidate, gate1), v)) return std::nullopt;
        return candidate;
    };
    // Completing T at one gate determines the split at the other gate up to
    // the Lemma 5.3 shift; shrink one side until the shifted copy lands in
    // the other.
    for (const Bits& w : all_strings_upto(depth)) {
        if (auto out = finish(lemma54_complete(t, gate0, split(u, w)))) return *out;
        if (auto out = finish(lemma54_complete(t, gate1, split(v, w)))) return *out;
    }
    fail(Errc::NoJoinFound, "lemma55_join exhausted shrink candidates of depth " +
                                std::to_string(depth));
}

LargeTree fuse(std::span<const LargeTree> chain, std::size_t depth) {
    if (chain.empty()) fail(Errc::NotAFusionChain, "fusion chain is empty");
    for (std::size_t i = 0; i + 1 < chain.size(); ++i)
        if (!refines(chain[i + 1], chain[i], i + 1))
            fail(Errc::NotAFusionChain,
                 "link " + std::to_string(i + 1) + " is not a ⊆_" + std::to_string(i + 1) +
                     " refinement");
    // Pair n stabilizes from chain[n+1] on, so a finite chain's intersection
    // is its last element; the stabilization law is re-checked explicitly.
    LargeTree out = chain.back();
    for (std::size_t n = 0; n + 1 < chain.size() && n <= depth; ++n) {
        ensure(out.pair(n) == chain[n + 1].pair(n), Errc::InternalCheckFailed,
               "fusion pair stabilization failed at pair " + std::to_string(n));
        ensure(refines(out, chain[n], n + 1), Errc::InternalCheckFailed,
               "fusion result does not ⊆_{n+1}-refine chain element " + std::to_string(n));
    }
    return out;
}

ForcingSet::ForcingSet(std::vector<LargeTree> generators) : generators_(std::move(generators)) {
    if (generators_.empty()) fail(Errc::PreconditionFailed, "forcing needs ≥ 1 generator");
    std::sort(generators_.begin(), generators_.end());
    generators_.erase(std::unique(generators_.begin(), generators_.end()), generators_.end());
}

bool ForcingSet::contains(const LargeTree& s) const {
    for (const LargeTree& gen : generators_) {
        // lh(stem(σ·(T(→s)))) = lh(u[s,T]) grows strictly with lh(s), so the
        // split depth is determined by the stem length, if it matches at all.
        std::size_t len = gen.stem().size();
        std::size_t n = 0;
        while (len < s.stem().size()) len += gen.pair(n++).length();
        if (len != s.stem().size()) continue;
        if (shift_witness(split(gen, Bits::zeros(n)), s)) return true;
    }
    return false;
}

bool is_collage(const LargeTree& t, std::size_t n, const ForcingSet& p, bool check_all) {
    bool verdict = p.contains(split(t, Bits::zeros(n)));
    if (check_all) {
        for (const Bits& u : all_strings(n))
            ensure(p.contains(split(t, u)) == verdict, Errc::InternalCheckFailed,
                   "collage one-u shortcut disagrees at u = " + u.str());
    }
    return verdict;
}

std::optional<std::vector<LargeTree>> covers_fin(const LargeTree& t,
                                                 const std::vector<LargeTree>& d) {
    std::size_t horizon = t.explicit_end();
    for (const auto& s : d) horizon = std::max(horizon, s.explicit_end());
    for (std::size_t h = 0; h <= horizon; ++h) {
        std::vector<bool> used(d.size(), false);
        bool all = true;
        for (const Bits& node : t.nodes_at(h)) {
            LargeTree piece = truncate(t, node).tree;
            bool hit = false;
            for (std::size_t i = 0; i < d.size(); ++i) {
                if (is_subtree(piece, d[i])) {
                    used[i] = true;
                    hit = true;
                    break;
                }
            }
            if (!hit) {
                all = false;
                break;
            }
        }
        if (all) {
            std::vector<LargeTree> witness;
            for (std::size_t i = 0; i < d.size(); ++i)
                if (used[i]) witness.push_back(d[i]);
            return witness;
        }
    }
    return std::nullopt;
}

std::vector<LargeTree> sample_forcing(const ForcingSet& p, std::size_t depth) {
    std::set<LargeTree> acc;
    for (const LargeTree& gen : p.generators())
        for (const Bits& s : all_strings_upto(depth)) {
            LargeTree base = split(gen, s);
            for (const Bits& sigma : all_strings_upto(depth)) acc.insert(act_on_tree(sigma, base));
        }
    return {acc.begin(), acc.end()};
}

ExtensionReport is_extension(const ForcingSet& p, const ForcingSet& q,
                             const std::vector<std::vector<LargeTree>>& dense_sets,
                             std::size_t sample_depth) {
    ExtensionReport report;
    report.sample_depth = sample_depth;
    std::vector<LargeTree> sp = sample_forcing(p, sample_depth);
    std::vector<LargeTree> sq = sample_forcing(q, sample_depth);
    // The ∃-clause searches Q deep enough to reach below every sampled tree
    // of P; the ∀-clauses range over the sample at the stated depth.
    std::size_t reach = sample_depth;
    for (const LargeTree& t : sp) reach = std::max(reach, t.explicit_end());
    std::vector<LargeTree> sq_deep = sample_forcing(q, sample_depth + reach);

    for (std::size_t i = 0; i < dense_sets.size(); ++i) {
        for (const LargeTree& t : sp) {
            bool compatible = false;
            for (const LargeTree& s : dense_sets[i]) {
                for (const LargeTree& r : sp)
                    if (is_subtree(r, t) && is_subtree(r, s)) {
                        compatible = true;
                        break;
                    }
                if (compatible) break;
            }
            if (!compatible)
                fail(Errc::NotPreDense, "supplied set #" + std::to_string(i) +
                                            " is not pre-dense below a sampled tree");
        }
    }

    report.dense_below = true;
    for (const LargeTree& t : sp) {
        bool found = false;
        for (const LargeTree& s : sq_deep)
            if (is_subtree(s, t)) {
                found = true;
                break;
            }
        if (!found) {
            report.dense_below = false;
            break;
        }
    }

    report.finitely_covered = true;
    report.respects_dense = true;
    for (const LargeTree& s : sq) {
        if (!covers_fin(s, sp)) {
            report.finitely_covered = false;
            break;
        }
        for (const auto& d : dense_sets)
            if (!covers_fin(s, d)) {
                report.respects_dense = false;
                break;
            }
        if (!report.respects_dense) break;
    }

    report.holds = report.dense_below && report.finitely_covered && report.respects_dense;
    return report;
}

const char* errc_name(Errc e) {
    switch (e) {
        case Errc::InsufficientDepth: return "InsufficientDepth";
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::NotANode: return "NotANode";
        case Errc::NotASubtree: return "NotASubtree";
        case Errc::PreconditionFailed: return "PreconditionFailed";
        case Errc::NoJoinFound: return "NoJoinFound";
        case Errc::NotAFusionChain: return "NotAFusionChain";
        case Errc::BaseNotContained: return "BaseNotContained";
        case Errc::BaseMismatch: return "BaseMismatch";
        case Errc::NotBelow: return "NotBelow";
        case Errc::NotDense: return "NotDense";
        case Errc::NotACollage: return "NotACollage";
        case Errc::IndexInUse: return "IndexInUse";
        case Errc::IndexMissing: return "IndexMissing";
        case Errc::IndexOutsideBase: return "IndexOutsideBase";
        case Errc::NotPreDense: return "NotPreDense";
        case Errc::MalformedBundle: return "MalformedBundle";
        case Errc::DepthExhausted: return "DepthExhausted";
        case Errc::NotGood: return "NotGood";
        case Errc::SimpleSomewhere: return "SimpleSomewhere";
        case Errc::SeparationImpossible: return "SeparationImpossible";
        case Errc::SupportNotContained: return "SupportNotContained";
        case Errc::Unbounded: return "Unbounded";
        case Errc::NotNormal: return "NotNormal";
        case Errc::NotArithmetic: return "NotArithmetic";
        case Errc::CodeInvalid: return "CodeInvalid";
        case Errc::ParseError: return "ParseError";
        case Errc::InternalCheckFailed: return "InternalCheckFailed";
    }
    return "UnknownError";
}

}  // namespace ltcalc
