#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ltcalc/bits.hpp"

namespace ltcalc {

// One splitting pair (q⁰, q¹): equal lengths ≥ 1, q⁰ starts with 0 and
// q¹ starts with 1.
struct BitPair {
    Bits q0;
    Bits q1;

    const Bits& q(int i) const { return i ? q1 : q0; }
    std::size_t length() const { return q0.size(); }
    bool is_cohen() const { return q0.size() == 1; }

    auto operator<=>(const BitPair&) const = default;
};

// Canonical presentation of a large tree: a stem, finitely many explicit
// splitting pairs, and the convention that every pair beyond the explicit
// list is (⟨0⟩, ⟨1⟩). Every presentation therefore denotes a total tree
// whose membership, inclusion and covering relations are exactly decidable.
// Presentations are kept canonical (trailing Cohen pairs stripped), so
// equality of presentations is equality of the denoted trees.
class LargeTree {
public:
    // The full binary tree 2^{<ω}.
    LargeTree() = default;

    // Validates the pair invariants and strips trailing Cohen pairs.
    LargeTree(Bits stem, std::vector<BitPair> pairs);

    static LargeTree cohen() { return LargeTree(); }
    // T[s]: the tree of all strings comparable with s.
    static LargeTree around(Bits s) { return LargeTree(std::move(s), {}); }

    const Bits& stem() const { return stem_; }
    const std::vector<BitPair>& explicit_pairs() const { return pairs_; }
    std::size_t explicit_pair_count() const { return pairs_.size(); }

    // Pair k under the tail convention.
    BitPair pair(std::size_t k) const;

    // spl_n: lh(stem) + Σ_{k<n} lh(q_k).
    std::size_t spl(std::size_t n) const;
    // First level after which the tree is the full binary tree below each
    // of its nodes: spl(explicit_pair_count()).
    std::size_t explicit_end() const { return spl(pairs_.size()); }

    bool is_cohen() const { return stem_.empty() && pairs_.empty(); }

    // t ∈ T.
    bool member(const Bits& t) const;

    // T ∩ 2^depth, lexicographically sorted.
    std::vector<Bits> nodes_at(std::size_t depth) const;
    // All nodes of length ≤ depth, in length-lex order.
    std::vector<Bits> nodes_upto(std::size_t depth) const;

    auto operator<=>(const LargeTree&) const = default;

private:
    Bits stem_;
    std::vector<BitPair> pairs_;
};

// T(→s): iterated simple splitting; split(T, Λ) = T.
LargeTree split(const LargeTree& t, const Bits& s);

// u[s,T] = stem(T(→s)).
Bits stem_of_split(const LargeTree& t, const Bits& s);

struct Truncation {
    LargeTree tree;  // T↾_u
    Bits selector;   // s[u] with T↾_u = T(→s[u])
};

// T↾_u as a canonical presentation, together with the selector string.
// Requires u ∈ T.
Truncation truncate(const LargeTree& t, const Bits& u);

// σ·T, re-canonicalized (a pair whose first bit flips swaps roles).
LargeTree act_on_tree(const Bits& sigma, const LargeTree& t);

// Lemma 5.3(ii): the σ with R(→s) = σ·(R(→t)). Requires lh(s) = lh(t).
Bits shift_between_splits(const LargeTree& r, const Bits& s, const Bits& t);

// If S = σ·R for some string σ, returns one such σ; otherwise nullopt.
std::optional<Bits> shift_witness(const LargeTree& r, const LargeTree& s);

// R ⊆ T as node sets, decided exactly on the presentations.
bool is_subtree(const LargeTree& r, const LargeTree& t);

// R ⊆ₙ T. For n ≥ 1: equal stems, pairs agree below n−1, pair n−1 of T is
// a componentwise prefix of pair n−1 of R, and R ⊆ T.
bool refines(const LargeTree& r, const LargeTree& t, std::size_t n);

// Lemma 5.4: the unique T' with T' ⊆ₙ T and T'(→s0) = U, built from the
// shifted copies u[s0,T]·u[s,T]·U. Requires U ⊆ T(→s0).
LargeTree lemma54_complete(const LargeTree& t, const Bits& s0, const LargeTree& u);

// Lemma 5.5: a T' with T' ⊆_{n+1} T, T'(→s0⌢0) ⊆ U and T'(→s1⌢1) ⊆ V,
// found by bounded search over shrinkings of U and V; postconditions are
// verified before returning. Throws NoJoinFound when the budget runs out.
LargeTree lemma55_join(const LargeTree& t, const Bits& s0, const Bits& s1, const LargeTree& u,
                       const LargeTree& v, std::size_t depth);

// Lemma 5.6: fusion of a chain T_{n+1} ⊆_{n+1} T_n. The result's pair n is
// pair n of chain[n+1] (stable from there on); refines(result, chain[n], n+1)
// is verified for every n the chain covers.
LargeTree fuse(std::span<const LargeTree> chain, std::size_t depth);

// The LT-forcing generated by a finite set per Example 6.2:
// P = {σ·(T(→s)) : T ∈ generators, s, σ ∈ 2^{<ω}}. Closed under truncation
// and the string action by construction; membership is decided exactly.
class ForcingSet {
public:
    explicit ForcingSet(std::vector<LargeTree> generators);

    static ForcingSet cohen() { return ForcingSet({LargeTree::cohen()}); }

    const std::vector<LargeTree>& generators() const { return generators_; }

    bool contains(const LargeTree& s) const;

    auto operator<=>(const ForcingSet&) const = default;

private:
    std::vector<LargeTree> generators_;
};

// T(→u) ∈ P for u ∈ 2^n. Checks u = 0^n; per Lemma 6.3 and E₀-invariance
// this settles all u. check_all re-verifies the full 2^n enumeration.
bool is_collage(const LargeTree& t, std::size_t n, const ForcingSet& p, bool check_all = false);

// A finite D' ⊆ D with [T] ⊆ ⋃_{S∈D'}[S], or nullopt. Exact: searches the
// least level h at which every node of T ∩ 2^h heads into some member.
std::optional<std::vector<LargeTree>> covers_fin(const LargeTree& t,
                                                 const std::vector<LargeTree>& d);

// Finite-scale surrogate for P ⊏ Q (Def 6.4) over generator-derived sample
// sets: Q reaches below every sampled T ∈ P, every sampled S ∈ Q is finitely
// covered by P-samples, and by every supplied pre-dense set.
struct ExtensionReport {
    bool holds = false;
    bool dense_below = false;      // 6.4(1)
    bool finitely_covered = false; // 6.4(2)
    bool respects_dense = false;   // the 𝔐-clause over the supplied sets
    std::size_t sample_depth = 0;
};

ExtensionReport is_extension(const ForcingSet& p, const ForcingSet& q,
                             const std::vector<std::vector<LargeTree>>& dense_sets,
                             std::size_t sample_depth = 2);

// The sample set the surrogate quantifies over: canonical forms of
// σ·(T(→s)) for generators T and lh(σ), lh(s) ≤ depth.
std::vector<LargeTree> sample_forcing(const ForcingSet& p, std::size_t depth);

}  // namespace ltcalc
