#pragma once

#include <functional>
#include <optional>
#include <set>

#include "ltcalc/multitree.hpp"

namespace ltcalc {

// A point of a brick at finite depth: one prefix per index.
struct BrickPoint {
    std::map<int, Bits> coords;

    const Bits& at(int xi) const;
    BrickPoint restricted(const IndexSet& c) const;

    auto operator<=>(const BrickPoint&) const = default;
};

// Finite-horizon code of a continuous map (2^ω)^B → 2^K. Cell k carries two
// finite sets of Cohen multitrees (finite support, every component a stem
// with no explicit pairs); bit k of the output is the side whose lifted
// brick contains the input. Soundness needs the two sides of each cell to
// be disjoint and jointly covering.
class CcfCode {
public:
    struct Cell {
        std::vector<Multitree> u0;
        std::vector<Multitree> u1;
        auto operator<=>(const Cell&) const = default;
    };

    CcfCode() = default;
    CcfCode(IndexSet base, std::vector<Cell> cells);

    const IndexSet& base() const { return base_; }
    std::size_t horizon() const { return cells_.size(); }
    const std::vector<Cell>& cells() const { return cells_; }

    // Largest defining stem length at index ξ.
    std::size_t dependence_depth(int xi) const;
    std::size_t max_dependence_depth() const;

    auto operator<=>(const CcfCode&) const = default;

private:
    IndexSet base_;
    std::vector<Cell> cells_;
};

struct CodeVerdict {
    bool valid = true;
    std::optional<std::size_t> cell;  // the offending k
    std::string reason;               // names the overlapping or uncovered witness
};

// Exact per-cell disjointness and covering check on the defining stems.
CodeVerdict validate_code(const CcfCode& c);

// f^c(x): the unique side per cell containing x. Requires x to cover the
// base at the defining depths.
Bits eval_code(const CcfCode& c, const BrickPoint& x);

// The quotient of [T] at uniform depth: every choice of one depth-long node
// per component, in lexicographic order.
std::vector<BrickPoint> brick_quotient(const Multitree& t, std::size_t depth);

// f factors through x↾C on [T]. Exact at depth ≥ the dependence depth.
bool reduced_to_set(const CcfCode& f, const IndexSet& c, const Multitree& t, std::size_t depth);
// Same over the union [T1] ∪ [T2].
bool reduced_to_set_union(const CcfCode& f, const IndexSet& c, const Multitree& t1,
                          const Multitree& t2, std::size_t depth);

// f factors through g on [T].
bool reduced_to_map(const CcfCode& f, const CcfCode& g, const Multitree& t, std::size_t depth);

// The coordinate map x ↦ x(α) factors through f on [T]; the coordinate is
// compared at the stated depth, so a true verdict is depth-relative.
bool captures(const CcfCode& f, int alpha, const Multitree& t, std::size_t depth);

// A σ with f(x) = σ·x(ξ) (truncated to the horizon) on all of [T],
// searched up to lh(σ) ≤ horizon; nullopt if none.
std::optional<Bits> is_simple(const CcfCode& f, int xi, const Multitree& t, std::size_t depth);

// f″[T] at the horizon.
std::set<Bits> image_set(const CcfCode& f, const Multitree& t, std::size_t depth);

// Builds the code of an explicitly tabulated map by carving one Cohen cell
// per input tuple at the given depth; eval_code is verified to reproduce
// the table.
CcfCode code_from_table(const IndexSet& base, std::size_t input_depth, std::size_t horizon,
                        const std::function<Bits(const BrickPoint&)>& table);

// m-goodness of T for the pair (f, g): for every σ ∈ 2^m the B∖{φ(m)}
// reduction holds or fails on every split shrink within the search budget,
// and every pair σ, τ is either image-disjoint or reduced to D[σ,τ] on the
// union of its bricks. Reductions and images are judged at the exactness
// depth derived from the two codes; `depth` only bounds the shrink search.
// The budget matters: a finite-horizon code is constant on deep enough
// cells, so an unbounded search would declare every coordinate stream
// reducible and the dichotomy below could never capture a coordinate.
bool is_m_good(const Multitree& t, std::size_t m, const CcfCode& f, const CcfCode& g,
               const LazySubmf& submf, const Scheduler& sched, std::size_t depth);

// One refinement step: from an m-good T to an (m+1)-good Q ≤_{m+1} T,
// following the component surgery of the refinement lemma. Postconditions
// are re-verified. Throws NotGood / DepthExhausted.
Multitree good_refine(const Multitree& t, std::size_t m, const CcfCode& f, const CcfCode& g,
                      const LazySubmf& submf, const Scheduler& sched, std::size_t depth);

// Shrinks T to a 0-good multitree for (f, g).
Multitree make_zero_good(const Multitree& t, const CcfCode& f, const CcfCode& g,
                         const LazySubmf& submf, const Scheduler& sched, std::size_t depth);

struct Dichotomy {
    enum class Kind { Reduced, Captured, Exhausted };
    Kind kind = Kind::Exhausted;
    Multitree witness;             // S for Reduced / Captured
    int eta = -1;                  // captured coordinate
    std::vector<Multitree> chain;  // the good chain, for resumption
    std::size_t depth = 0;
};

// Budget-bounded dichotomy: iterate good refinements, then run the case
// analysis at the reached depth. Reduced/Captured verdicts are re-verified
// by the predicates above before being returned.
Dichotomy classify_dichotomy(const Multitree& t, const CcfCode& f, const CcfCode& g,
                             const LazySubmf& submf, const Scheduler& sched, std::size_t budget,
                             std::size_t depth);

// Separating the image of f from a tree: T' ≤_m T and U' ⊆_n U, both still
// collages, with [U'] ∩ f″[T'] = ∅ verified exhaustively at the horizon.
std::pair<Multitree, LargeTree> separate_image(const Multitree& t, std::size_t m,
                                               const LargeTree& u, std::size_t n, const CcfCode& f,
                                               const ForcingSet& p, const LazySubmf& submf,
                                               const Scheduler& sched);

// Separating the image of f from the ξ-th coordinate: T' ≤_m T, still an
// m-collage, with [T'(ξ)] ∩ f″[T'] = ∅. Requires f non-simple for ξ on
// every T(⇒r).
Multitree separate_diagonal(const Multitree& t, std::size_t m, int xi, const CcfCode& f,
                            const LazySubmf& submf, const Scheduler& sched);

}  // namespace ltcalc
