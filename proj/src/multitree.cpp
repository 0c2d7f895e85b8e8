#include "ltcalc/multitree.hpp"

#include <algorithm>

namespace ltcalc {

namespace {

std::string idx_str(int xi) { return std::to_string(xi); }

// [A] ∩ [B] = ∅, exact: with the tail convention two trees share a branch
// iff they share a node at the level past both explicit structures.
bool branch_disjoint(const LargeTree& a, const LargeTree& b) {
    std::size_t h = std::max(a.explicit_end(), b.explicit_end());
    for (const Bits& node : a.nodes_at(h))
        if (b.member(node)) return false;
    return true;
}

}  // namespace

IndexSet Multitree::base() const {
    IndexSet out;
    for (const auto& [xi, tree] : entries_) out.insert(xi);
    return out;
}

const LargeTree& Multitree::at(int xi) const {
    auto it = entries_.find(xi);
    if (it == entries_.end())
        fail(Errc::IndexOutsideBase, "multitree has no component " + idx_str(xi));
    return it->second;
}

Multitree Multitree::with(int xi, LargeTree tree) const {
    auto entries = entries_;
    entries[xi] = std::move(tree);
    return Multitree(std::move(entries));
}

bool Multitree::leq(const Multitree& s) const {
    for (const auto& [xi, tree] : s.entries_) {
        auto it = entries_.find(xi);
        if (it == entries_.end() || !is_subtree(it->second, tree)) return false;
    }
    return true;
}

Scheduler::Scheduler(IndexSet base) : base_(base.begin(), base.end()) {}

int Scheduler::phi(std::size_t m) const {
    if (base_.empty()) fail(Errc::PreconditionFailed, "scheduler over the empty base");
    return base_[m % base_.size()];
}

std::size_t Scheduler::nu(std::size_t m, int xi) const {
    auto it = std::lower_bound(base_.begin(), base_.end(), xi);
    if (it == base_.end() || *it != xi) return 0;
    std::size_t idx = static_cast<std::size_t>(it - base_.begin());
    if (m <= idx) return 0;
    return (m - idx - 1) / base_.size() + 1;
}

std::size_t Scheduler::position(std::size_t j, int xi) const {
    auto it = std::lower_bound(base_.begin(), base_.end(), xi);
    if (it == base_.end() || *it != xi)
        fail(Errc::IndexOutsideBase, "index " + idx_str(xi) + " outside scheduler base");
    return static_cast<std::size_t>(it - base_.begin()) + j * base_.size();
}

IndexSet Scheduler::image(std::size_t m) const {
    IndexSet out;
    for (std::size_t k = 0; k < m && k < base_.size(); ++k) out.insert(base_[k]);
    return out;
}

Multitree restrict_to(const Multitree& t, const IndexSet& c) {
    std::map<int, LargeTree> entries;
    for (const auto& [xi, tree] : t.entries())
        if (c.count(xi)) entries.emplace(xi, tree);
    return Multitree(std::move(entries));
}

Multitree lift(const Multitree& t, const IndexSet& c) {
    for (const auto& [xi, tree] : t.entries())
        if (!c.count(xi))
            fail(Errc::BaseNotContained, "lift target misses index " + idx_str(xi));
    std::map<int, LargeTree> entries = t.entries();
    for (int xi : c)
        if (!entries.count(xi)) entries.emplace(xi, LargeTree::cohen());
    return Multitree(std::move(entries));
}

Bits sub_string(const Bits& sigma, int xi, const Scheduler& sched) {
    bool present = std::binary_search(sched.base().begin(), sched.base().end(), xi);
    if (!present) fail(Errc::IndexOutsideBase, "index " + idx_str(xi) + " outside base");
    Bits out;
    for (std::size_t k = 0; k < sigma.size(); ++k)
        if (sched.phi(k) == xi) out.push_back(sigma.at(k));
    return out;
}

Multitree mt_split(const Multitree& t, const Bits& sigma, const Scheduler& sched) {
    if (t.base() != sched.base_set())
        fail(Errc::BaseMismatch, "mt_split requires |T| = scheduler base");
    std::map<int, LargeTree> entries;
    for (const auto& [xi, tree] : t.entries())
        entries.emplace(xi, split(tree, sub_string(sigma, xi, sched)));
    return Multitree(std::move(entries));
}

IndexSet d_set(const Bits& sigma, const Bits& tau, const Scheduler& sched) {
    if (sigma.size() != tau.size()) fail(Errc::LengthMismatch, "d_set needs equal lengths");
    IndexSet out = sched.base_set();
    for (std::size_t i = 0; i < sigma.size(); ++i)
        if (sigma.at(i) != tau.at(i)) out.erase(sched.phi(i));
    return out;
}

bool mt_refines(const Multitree& t, const Multitree& s, std::size_t m, const Scheduler& sched) {
    if (t.base() != sched.base_set() || s.base() != sched.base_set())
        fail(Errc::BaseMismatch, "mt_refines requires |T| = |S| = scheduler base");
    for (const auto& [xi, tree] : t.entries())
        if (!refines(tree, s.at(xi), sched.nu(m, xi))) return false;
    return true;
}

std::optional<std::vector<Multitree>> covers_fd(const Multitree& u,
                                                const std::vector<Multitree>& d,
                                                bool require_disjoint) {
    IndexSet c = u.base();
    std::vector<Multitree> lifted;  // candidates with |V| ⊆ C, lifted to C
    std::vector<std::size_t> source;
    for (std::size_t i = 0; i < d.size(); ++i) {
        bool contained = true;
        for (const auto& [xi, tree] : d[i].entries())
            if (!c.count(xi)) {
                contained = false;
                break;
            }
        if (contained) {
            lifted.push_back(lift(d[i], c));
            source.push_back(i);
        }
    }

    std::map<int, std::size_t> horizon;
    for (int xi : c) {
        std::size_t h = u.at(xi).explicit_end();
        for (const auto& v : lifted) h = std::max(h, v.at(xi).explicit_end());
        horizon[xi] = h;
    }

    // Enumerate the quotient of [U] at the per-component horizons.
    std::vector<std::map<int, Bits>> tuples{{}};
    for (int xi : c) {
        std::vector<std::map<int, Bits>> next;
        for (const auto& partial : tuples)
            for (const Bits& node : u.at(xi).nodes_at(horizon[xi])) {
                auto copy = partial;
                copy[xi] = node;
                next.push_back(std::move(copy));
            }
        tuples = std::move(next);
    }

    auto covers_tuple = [&](std::size_t vi, const std::map<int, Bits>& tuple) {
        for (int xi : c)
            if (!lifted[vi].at(xi).member(tuple.at(xi))) return false;
        return true;
    };

    if (!require_disjoint) {
        std::set<std::size_t> used;
        for (const auto& tuple : tuples) {
            bool hit = false;
            for (std::size_t vi = 0; vi < lifted.size(); ++vi)
                if (covers_tuple(vi, tuple)) {
                    used.insert(vi);
                    hit = true;
                    break;
                }
            if (!hit) return std::nullopt;
        }
        std::vector<Multitree> witness;
        for (std::size_t vi : used) witness.push_back(d[source[vi]]);
        return witness;
    }

    // ⊆^fd⋁ needs a pairwise disjoint covering sub-collection; search subsets
    // in size order for the smallest witness.
    auto disjoint = [&](std::size_t a, std::size_t b) {
        for (int xi : c)
            if (branch_disjoint(lifted[a].at(xi), lifted[b].at(xi))) return true;
        return false;
    };
    std::size_t n = lifted.size();
    if (n > 20) fail(Errc::PreconditionFailed, "covers_fd candidate set too large");
    std::vector<std::size_t> masks;
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) masks.push_back(mask);
    std::sort(masks.begin(), masks.end(), [](std::size_t a, std::size_t b) {
        int pa = __builtin_popcountll(a), pb = __builtin_popcountll(b);
        return pa != pb ? pa < pb : a < b;
    });
    for (std::size_t mask : masks) {
        std::vector<std::size_t> pick;
        for (std::size_t vi = 0; vi < n; ++vi)
            if (mask & (std::size_t{1} << vi)) pick.push_back(vi);
        bool ok = true;
        for (std::size_t a = 0; a < pick.size() && ok; ++a)
            for (std::size_t bb = a + 1; bb < pick.size() && ok; ++bb)
                if (!disjoint(pick[a], pick[bb])) ok = false;
        if (!ok) continue;
        for (const auto& tuple : tuples) {
            bool hit = false;
            for (std::size_t vi : pick)
                if (covers_tuple(vi, tuple)) {
                    hit = true;
                    break;
                }
            if (!hit) {
                ok = false;
                break;
            }
        }
        if (ok) {
            std::vector<Multitree> witness;
            for (std::size_t vi : pick) witness.push_back(d[source[vi]]);
            return witness;
        }
    }
    return std::nullopt;
}

Multitree mt_complete(const Multitree& t, const Bits& sigma, const Multitree& u,
                      const Scheduler& sched) {
    Multitree gate = mt_split(t, sigma, sched);
    if (u.base() != t.base()) fail(Errc::BaseMismatch, "mt_complete requires |U| = |T|");
    if (!u.leq(gate)) fail(Errc::NotBelow, "mt_complete requires U ≤ T(⇒σ)");
    std::map<int, LargeTree> entries;
    for (const auto& [xi, tree] : t.entries())
        entries.emplace(xi, lemma54_complete(tree, sub_string(sigma, xi, sched), u.at(xi)));
    Multitree out(std::move(entries));
    ensure(mt_refines(out, t, sigma.size(), sched), Errc::InternalCheckFailed,
           "mt_complete: S ≤_m T failed");
    ensure(mt_split(out, sigma, sched) == u, Errc::InternalCheckFailed,
           "mt_complete: S(⇒σ) ≠ U");
    return out;
}

Multitree mt_fuse(std::span<const Multitree> chain, std::size_t depth, const Scheduler& sched) {
    if (chain.empty()) fail(Errc::NotAFusionChain, "fusion chain is empty");
    for (std::size_t i = 0; i + 1 < chain.size(); ++i)
        if (!mt_refines(chain[i + 1], chain[i], i + 1, sched))
            fail(Errc::NotAFusionChain,
                 "link " + std::to_string(i + 1) + " is not a ≤_" + std::to_string(i + 1) +
                     " refinement");
    Multitree out = chain.back();
    for (std::size_t n = 0; n + 1 < chain.size() && n <= depth; ++n)
        ensure(mt_refines(out, chain[n], n + 1, sched), Errc::InternalCheckFailed,
               "fusion result does not ≤_{n+1}-refine chain element " + std::to_string(n));
    return out;
}

Multiforcing::Multiforcing(std::map<int, std::vector<LargeTree>> components)
    : components_(std::move(components)) {
    for (auto& [xi, trees] : components_) {
        if (trees.empty())
            fail(Errc::PreconditionFailed, "component " + idx_str(xi) + " is empty");
        std::sort(trees.begin(), trees.end());
        trees.erase(std::unique(trees.begin(), trees.end()), trees.end());
    }
}

IndexSet Multiforcing::base() const {
    IndexSet out;
    for (const auto& [xi, trees] : components_) out.insert(xi);
    return out;
}

const std::vector<LargeTree>& Multiforcing::at(int xi) const {
    auto it = components_.find(xi);
    if (it == components_.end())
        fail(Errc::IndexOutsideBase, "multiforcing has no component " + idx_str(xi));
    return it->second;
}

bool Multiforcing::regular() const {
    for (const auto& [xi, trees] : components_)
        if (std::find(trees.begin(), trees.end(), LargeTree::cohen()) == trees.end()) return false;
    return true;
}

bool Multiforcing::mt_member(const Multitree& t) const {
    for (const auto& [xi, tree] : t.entries()) {
        if (!has(xi)) return false;
        const auto& trees = at(xi);
        if (std::find(trees.begin(), trees.end(), tree) == trees.end()) return false;
    }
    return true;
}

std::vector<Multitree> submf_closure(const std::vector<Multitree>& seed, const Multiforcing& p) {
    if (!p.regular()) fail(Errc::PreconditionFailed, "submf_closure needs a regular multiforcing");
    for (const auto& t : seed)
        if (!p.mt_member(t))
            fail(Errc::PreconditionFailed, "seed multitree is not a member of MT(P)");

    std::set<Multitree> acc(seed.begin(), seed.end());
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<Multitree> snapshot(acc.begin(), acc.end());
        for (const Multitree& t : snapshot) {
            // (I) replace a component inside P(ξ); (II) extend the base by
            // one index with any tree of P(ξ).
            for (int xi : p.base())
                for (const LargeTree& tree : p.at(xi))
                    grew |= acc.insert(t.with(xi, tree)).second;
            // (III) Cohen padding to the union of two bases.
            for (const Multitree& s : snapshot) {
                IndexSet joint = t.base();
                for (int xi : s.base()) joint.insert(xi);
                grew |= acc.insert(lift(t, joint)).second;
            }
        }
    }
    return {acc.begin(), acc.end()};
}

bool mt_is_collage(const Multitree& t, std::size_t m, const std::vector<Multitree>& submf,
                   const Scheduler& sched) {
    for (const Bits& u : all_strings(m)) {
        Multitree piece = mt_split(t, u, sched);
        if (std::find(submf.begin(), submf.end(), piece) == submf.end()) return false;
    }
    return true;
}

LazySubmf::LazySubmf(std::map<int, ForcingSet> components) : components_(std::move(components)) {}

LazySubmf LazySubmf::of(const Multiforcing& p) {
    std::map<int, ForcingSet> components;
    for (const auto& [xi, trees] : p.components()) components.emplace(xi, ForcingSet(trees));
    return LazySubmf(std::move(components));
}

IndexSet LazySubmf::base() const {
    IndexSet out;
    for (const auto& [xi, f] : components_) out.insert(xi);
    return out;
}

const ForcingSet& LazySubmf::forcing(int xi) const {
    auto it = components_.find(xi);
    if (it == components_.end())
        fail(Errc::IndexOutsideBase, "submultiforcing has no component " + idx_str(xi));
    return it->second;
}

bool LazySubmf::contains(const Multitree& t) const {
    for (const auto& [xi, tree] : t.entries()) {
        auto it = components_.find(xi);
        if (it == components_.end() || !it->second.contains(tree)) return false;
    }
    return true;
}

bool mt_is_collage(const Multitree& t, std::size_t m, const LazySubmf& submf,
                   const Scheduler& sched) {
    for (const Bits& u : all_strings(m))
        if (!submf.contains(mt_split(t, u, sched))) return false;
    return true;
}

Multitree collage_refine(const Multitree& t, std::size_t m, const std::vector<Multitree>& d,
                         const std::vector<Multitree>& submf, const Scheduler& sched) {
    if (!mt_is_collage(t, m, submf, sched))
        fail(Errc::NotACollage, "collage_refine requires an m-collage over 𝔖");
    for (const Multitree& s : d)
        if (std::find(submf.begin(), submf.end(), s) == submf.end())
            fail(Errc::NotDense, "D is not a subset of 𝔖");
    for (const Multitree& x : submf) {
        bool reached = false;
        for (const Multitree& s : d)
            if (s.leq(x)) {
                reached = true;
                break;
            }
        if (!reached) fail(Errc::NotDense, "D is not dense in 𝔖");
    }
    // Later completions shrink earlier σ-pieces, so D must also be open.
    for (const Multitree& x : submf)
        for (const Multitree& s : d)
            if (x.leq(s) && std::find(d.begin(), d.end(), x) == d.end())
                fail(Errc::NotDense, "D is not open in 𝔖");

    Multitree cur = t;
    for (const Bits& sigma : all_strings(m)) {
        Multitree piece = mt_split(cur, sigma, sched);
        const Multitree* pick = nullptr;
        for (const Multitree& s : d)
            if (s.leq(piece)) {
                pick = &s;
                break;
            }
        ensure(pick != nullptr, Errc::InternalCheckFailed,
               "no D-member below T(⇒σ) despite density");
        cur = mt_complete(cur, sigma, *pick, sched);
    }
    ensure(mt_refines(cur, t, m, sched), Errc::InternalCheckFailed, "collage_refine: S ≤_m T");
    for (const Bits& sigma : all_strings(m))
        ensure(std::find(d.begin(), d.end(), mt_split(cur, sigma, sched)) != d.end(),
               Errc::InternalCheckFailed, "collage_refine: S(⇒σ) ∉ D at σ = " + sigma.str());
    return cur;
}

const Multitree& System::at(int k, int m) const {
    auto it = table_.find({k, m});
    if (it == table_.end())
        fail(Errc::IndexMissing,
             "system has no cell (" + std::to_string(k) + ", " + std::to_string(m) + ")");
    return it->second;
}

void System::put(int k, int m, Multitree t) { table_[{k, m}] = std::move(t); }

int System::nu(int k) const {
    int best = -1;
    for (const auto& [key, cell] : table_)
        if (key.first == k) best = std::max(best, key.second);
    return best;
}

IndexSet System::support() const {
    IndexSet out;
    for (const auto& [key, cell] : table_) out.insert(key.first);
    return out;
}

SystemVerdict validate_system(const System& sys, const std::vector<Multitree>& submf,
                              const Scheduler& sched) {
    SystemVerdict verdict;
    verdict.support = sys.support();
    for (int k : verdict.support) verdict.nu[k] = sys.nu(k);
    for (const auto& [key, cell] : sys.table()) {
        auto [k, m] = key;
        if (m > 0 && !sys.has(k, m - 1)) {
            verdict.valid = false;
            verdict.offending = key;
            verdict.reason = "domain not downward closed";
            return verdict;
        }
        if (cell.base() != sched.base_set()) {
            verdict.valid = false;
            verdict.offending = key;
            verdict.reason = "cell base differs from B";
            return verdict;
        }
        if (!mt_is_collage(cell, static_cast<std::size_t>(m), submf, sched)) {
            verdict.valid = false;
            verdict.offending = key;
            verdict.reason = "cell is not an m-collage over 𝔖";
            return verdict;
        }
        if (m > 0 && !mt_refines(cell, sys.at(k, m - 1), static_cast<std::size_t>(m), sched)) {
            verdict.valid = false;
            verdict.offending = key;
            verdict.reason = "≤_m chain broken";
            return verdict;
        }
    }
    return verdict;
}

namespace {
System validated(System out, const std::vector<Multitree>& submf, const Scheduler& sched) {
    SystemVerdict verdict = validate_system(out, submf, sched);
    if (!verdict.valid)
        fail(Errc::PreconditionFailed, "extension is not a system: " + verdict.reason);
    return out;
}
}  // namespace

System extend_system_trivial(const System& sys, int k, const std::vector<Multitree>& submf,
                             const Scheduler& sched) {
    int m = sys.nu(k);
    if (m < 0) fail(Errc::IndexMissing, "row " + std::to_string(k) + " not in the system");
    System out = sys;
    out.put(k, m + 1, sys.at(k, m));
    return validated(std::move(out), submf, sched);
}

System extend_system_new(const System& sys, int k, const Multitree& t,
                         const std::vector<Multitree>& submf, const Scheduler& sched) {
    if (sys.nu(k) >= 0) fail(Errc::IndexInUse, "row " + std::to_string(k) + " already present");
    Multitree cell = lift(t, sched.base_set());
    if (std::find(submf.begin(), submf.end(), cell) == submf.end())
        fail(Errc::PreconditionFailed, "new row's multitree is not in 𝔖↑");
    System out = sys;
    out.put(k, 0, cell);
    return validated(std::move(out), submf, sched);
}

}  // namespace ltcalc
