#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "ltcalc/tree.hpp"

namespace ltcalc {

using IndexSet = std::set<int>;

// A finite-support multitree: a finite map from indices to large trees.
// Ordered componentwise; the empty multitree is the weakest condition.
class Multitree {
public:
    Multitree() = default;
    explicit Multitree(std::map<int, LargeTree> entries) : entries_(std::move(entries)) {}

    static Multitree empty() { return Multitree(); }

    const std::map<int, LargeTree>& entries() const { return entries_; }
    IndexSet base() const;
    bool has(int xi) const { return entries_.count(xi) != 0; }
    const LargeTree& at(int xi) const;
    Multitree with(int xi, LargeTree tree) const;

    // T ≤ S: |S| ⊆ |T| and T(ξ) ⊆ S(ξ) on |S|.
    bool leq(const Multitree& s) const;

    auto operator<=>(const Multitree&) const = default;

private:
    std::map<int, LargeTree> entries_;
};

// Deterministic B-complete function: round-robin over the sorted base.
// Every index is hit infinitely often and every ν_{mξ} is reproducible.
class Scheduler {
public:
    explicit Scheduler(IndexSet base);

    const std::vector<int>& base() const { return base_; }
    IndexSet base_set() const { return IndexSet(base_.begin(), base_.end()); }

    // φ(m).
    int phi(std::size_t m) const;
    // ν_{mξ} = |{k < m : φ(k) = ξ}|.
    std::size_t nu(std::size_t m, int xi) const;
    // k_{jξ}: the j-th position at which φ takes the value ξ.
    std::size_t position(std::size_t j, int xi) const;
    // φ″m.
    IndexSet image(std::size_t m) const;

private:
    std::vector<int> base_;
};

// Restriction T↾C.
Multitree restrict_to(const Multitree& t, const IndexSet& c);

// T↑C: new indices filled with 2^{<ω}. Requires |T| ⊆ C.
Multitree lift(const Multitree& t, const IndexSet& c);

// σ↾ξ: the substring of σ routed to component ξ.
Bits sub_string(const Bits& sigma, int xi, const Scheduler& sched);

// T(⇒σ): componentwise split by the routed substrings. Requires |T| = B.
Multitree mt_split(const Multitree& t, const Bits& sigma, const Scheduler& sched);

// D[σ,τ] = B ∖ {φ(i) : i < m, σ(i) ≠ τ(i)}.
IndexSet d_set(const Bits& sigma, const Bits& tau, const Scheduler& sched);

// T ≤_m S: componentwise ⊆ with the ν-exponents.
bool mt_refines(const Multitree& t, const Multitree& s, std::size_t m, const Scheduler& sched);

// A finite D' ⊆ D witnessing U ⊆^fin⋁ D (Def 7.2 (1)–(2)); with
// require_disjoint also (3), giving ⊆^fd⋁.
std::optional<std::vector<Multitree>> covers_fd(const Multitree& u,
                                                const std::vector<Multitree>& d,
                                                bool require_disjoint);

// Lemma 7.4(iv): the unique S with S ≤_m T and S(⇒σ) = U.
// Requires U ≤ T(⇒σ).
Multitree mt_complete(const Multitree& t, const Bits& sigma, const Multitree& u,
                      const Scheduler& sched);

// Lemma 7.5: fusion of a ≤_{n+1}-chain, componentwise.
Multitree mt_fuse(std::span<const Multitree> chain, std::size_t depth, const Scheduler& sched);

// A multiforcing with explicit finite component sets. Regular when 2^{<ω}
// belongs to every component.
class Multiforcing {
public:
    Multiforcing() = default;
    explicit Multiforcing(std::map<int, std::vector<LargeTree>> components);

    const std::map<int, std::vector<LargeTree>>& components() const { return components_; }
    IndexSet base() const;
    bool has(int xi) const { return components_.count(xi) != 0; }
    const std::vector<LargeTree>& at(int xi) const;
    bool regular() const;

    // Component ξ as a generated forcing, for lazy membership.
    ForcingSet forcing(int xi) const { return ForcingSet(at(xi)); }

    // T ∈ MT(P) with components read as explicit sets.
    bool mt_member(const Multitree& t) const;

private:
    std::map<int, std::vector<LargeTree>> components_;
};

// Least superset of the seed closed under Def 9.1 (I) component replacement,
// (II) base extension, (III) Cohen padding. Finite because the component
// sets are explicit. Requires a regular P and seed ⊆ MT(P).
std::vector<Multitree> submf_closure(const std::vector<Multitree>& seed, const Multiforcing& p);

// T(⇒u) ∈ 𝔖 for all u ∈ 2^m, over an explicit finite 𝔖.
bool mt_is_collage(const Multitree& t, std::size_t m, const std::vector<Multitree>& submf,
                   const Scheduler& sched);

// Lazy submultiforcing: all multitrees with base ⊆ |P| whose components lie
// in the generated forcings. Closed under Def 9.1 by construction; used
// where constructions truncate components arbitrarily deep.
class LazySubmf {
public:
    explicit LazySubmf(std::map<int, ForcingSet> components);
    static LazySubmf of(const Multiforcing& p);

    IndexSet base() const;
    const ForcingSet& forcing(int xi) const;
    bool contains(const Multitree& t) const;

private:
    std::map<int, ForcingSet> components_;
};

bool mt_is_collage(const Multitree& t, std::size_t m, const LazySubmf& submf,
                   const Scheduler& sched);

// Lemma 9.3(iii): an S ≤_m T, still an m-collage, with S(⇒σ) ∈ D for every
// σ ∈ 2^m. D must be open dense in the finite 𝔖 (pre-checked).
Multitree collage_refine(const Multitree& t, std::size_t m, const std::vector<Multitree>& d,
                         const std::vector<Multitree>& submf, const Scheduler& sched);

// A system over 𝔖↑ (Def 13.1): a finite grid of m-collages with ≤_m chains
// along each row.
class System {
public:
    System() = default;

    bool has(int k, int m) const { return table_.count({k, m}) != 0; }
    const Multitree& at(int k, int m) const;
    void put(int k, int m, Multitree t);
    const std::map<std::pair<int, int>, Multitree>& table() const { return table_; }

    // ν_k^φ: largest m with (k,m) in the domain, or -1.
    int nu(int k) const;
    // |φ|.
    IndexSet support() const;

    auto operator<=>(const System&) const = default;

private:
    std::map<std::pair<int, int>, Multitree> table_;
};

struct SystemVerdict {
    bool valid = true;
    std::optional<std::pair<int, int>> offending;
    std::string reason;
    std::map<int, int> nu;
    IndexSet support;
};

SystemVerdict validate_system(const System& sys, const std::vector<Multitree>& submf,
                              const Scheduler& sched);

// Lemma 13.2(i): duplicate the last cell of row k one level up.
System extend_system_trivial(const System& sys, int k, const std::vector<Multitree>& submf,
                             const Scheduler& sched);
// Lemma 13.2(ii): open a new row k with the multitree T ∈ 𝔖↑.
System extend_system_new(const System& sys, int k, const Multitree& t,
                         const std::vector<Multitree>& submf, const Scheduler& sched);

}  // namespace ltcalc
