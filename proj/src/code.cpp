#include "ltcalc/code.hpp"

#include <algorithm>

namespace ltcalc {

namespace {

IndexSet minus(const IndexSet& b, int xi) {
    IndexSet out = b;
    out.erase(xi);
    return out;
}

// Defining stem of a cell member at ξ; absent components constrain nothing.
const Bits& defining_stem(const Multitree& t, int xi) {
    static const Bits empty;
    auto it = t.entries().find(xi);
    return it == t.entries().end() ? empty : it->second.stem();
}

bool matches(const Multitree& t, const BrickPoint& x) {
    for (const auto& [xi, tree] : t.entries())
        if (!tree.stem().prefix_of(x.at(xi))) return false;
    return true;
}

void check_cohen_member(const Multitree& t, const IndexSet& base, std::size_t k) {
    for (const auto& [xi, tree] : t.entries()) {
        if (!base.count(xi))
            fail(Errc::CodeInvalid, "cell " + std::to_string(k) + " member leaves the base");
        if (!tree.explicit_pairs().empty())
            fail(Errc::CodeInvalid,
                 "cell " + std::to_string(k) + " member is not a Cohen multitree");
    }
}

}  // namespace

const Bits& BrickPoint::at(int xi) const {
    auto it = coords.find(xi);
    if (it == coords.end())
        fail(Errc::IndexOutsideBase, "point has no coordinate " + std::to_string(xi));
    return it->second;
}

BrickPoint BrickPoint::restricted(const IndexSet& c) const {
    BrickPoint out;
    for (const auto& [xi, bits] : coords)
        if (c.count(xi)) out.coords.emplace(xi, bits);
    return out;
}

CcfCode::CcfCode(IndexSet base, std::vector<Cell> cells)
    : base_(std::move(base)), cells_(std::move(cells)) {
    for (std::size_t k = 0; k < cells_.size(); ++k) {
        for (const Multitree& t : cells_[k].u0) check_cohen_member(t, base_, k);
        for (const Multitree& t : cells_[k].u1) check_cohen_member(t, base_, k);
    }
}

std::size_t CcfCode::dependence_depth(int xi) const {
    std::size_t out = 0;
    for (const Cell& cell : cells_)
        for (const auto* side : {&cell.u0, &cell.u1})
            for (const Multitree& t : *side) out = std::max(out, defining_stem(t, xi).size());
    return out;
}

std::size_t CcfCode::max_dependence_depth() const {
    std::size_t out = 0;
    for (int xi : base_) out = std::max(out, dependence_depth(xi));
    return out;
}

CodeVerdict validate_code(const CcfCode& c) {
    CodeVerdict verdict;
    for (std::size_t k = 0; k < c.horizon(); ++k) {
        const auto& cell = c.cells()[k];
        // disjointness across the two sides
        for (const Multitree& t : cell.u0)
            for (const Multitree& s : cell.u1) {
                bool disjoint = false;
                for (int xi : c.base())
                    if (!defining_stem(t, xi).comparable(defining_stem(s, xi))) {
                        disjoint = true;
                        break;
                    }
                if (!disjoint) {
                    verdict.valid = false;
                    verdict.cell = k;
                    verdict.reason = "overlapping cells across the two sides";
                    return verdict;
                }
            }
        // covering: the stem-level partition exhausts the space
        std::map<int, std::size_t> level;
        for (int xi : c.base()) {
            std::size_t l = 0;
            for (const auto* side : {&cell.u0, &cell.u1})
                for (const Multitree& t : *side) l = std::max(l, defining_stem(t, xi).size());
            level[xi] = l;
        }
        std::vector<BrickPoint> tuples{{}};
        for (int xi : c.base()) {
            std::vector<BrickPoint> next;
            for (const auto& partial : tuples)
                for (const Bits& s : all_strings(level[xi])) {
                    BrickPoint copy = partial;
                    copy.coords[xi] = s;
                    next.push_back(std::move(copy));
                }
            tuples = std::move(next);
        }
        for (const BrickPoint& x : tuples) {
            bool hit = false;
            for (const auto* side : {&cell.u0, &cell.u1}) {
                for (const Multitree& t : *side)
                    if (matches(t, x)) {
                        hit = true;
                        break;
                    }
                if (hit) break;
            }
            if (!hit) {
                verdict.valid = false;
                verdict.cell = k;
                std::string desc;
                for (const auto& [xi, bits] : x.coords)
                    desc += std::to_string(xi) + "↦\"" + bits.str() + "\" ";
                verdict.reason = "uncovered point " + desc;
                return verdict;
            }
        }
    }
    return verdict;
}

Bits eval_code(const CcfCode& c, const BrickPoint& x) {
    for (int xi : c.base()) {
        auto it = x.coords.find(xi);
        if (it == x.coords.end() || it->second.size() < c.dependence_depth(xi))
            fail(Errc::InsufficientDepth,
                 "point too shallow at index " + std::to_string(xi) + " for this code");
    }
    Bits out;
    for (std::size_t k = 0; k < c.horizon(); ++k) {
        const auto& cell = c.cells()[k];
        int bit = -1;
        for (const Multitree& t : cell.u0)
            if (matches(t, x)) {
                bit = 0;
                break;
            }
        for (const Multitree& t : cell.u1)
            if (matches(t, x)) {
                if (bit == 0)
                    fail(Errc::CodeInvalid, "both sides of cell " + std::to_string(k) + " match");
                bit = 1;
                break;
            }
        if (bit < 0) fail(Errc::CodeInvalid, "no side of cell " + std::to_string(k) + " matches");
        out.push_back(bit);
    }
    return out;
}

std::vector<BrickPoint> brick_quotient(const Multitree& t, std::size_t depth) {
    std::vector<BrickPoint> out{{}};
    for (const auto& [xi, tree] : t.entries()) {
        std::vector<BrickPoint> next;
        for (const auto& partial : out)
            for (const Bits& node : tree.nodes_at(depth)) {
                BrickPoint copy = partial;
                copy.coords[xi] = node;
                next.push_back(std::move(copy));
            }
        out = std::move(next);
    }
    return out;
}

namespace {

void require_compatible(const CcfCode& f, const Multitree& t, std::size_t depth) {
    if (t.base() != f.base())
        fail(Errc::BaseMismatch, "multitree base differs from the code's base");
    if (depth < f.max_dependence_depth())
        fail(Errc::InsufficientDepth, "depth below the code's dependence depth");
}

using Projection = std::vector<std::pair<int, Bits>>;

Projection project(const BrickPoint& x, const IndexSet& c) {
    Projection out;
    for (const auto& [xi, bits] : x.coords)
        if (c.count(xi)) out.emplace_back(xi, bits);
    return out;
}

bool reduced_over(const CcfCode& f, const IndexSet& c, const std::vector<BrickPoint>& points) {
    std::map<Projection, Bits> groups;
    for (const BrickPoint& x : points) {
        Bits value = eval_code(f, x);
        auto [it, inserted] = groups.emplace(project(x, c), value);
        if (!inserted && it->second != value) return false;
    }
    return true;
}

}  // namespace

bool reduced_to_set(const CcfCode& f, const IndexSet& c, const Multitree& t, std::size_t depth) {
    require_compatible(f, t, depth);
    return reduced_over(f, c, brick_quotient(t, depth));
}

bool reduced_to_set_union(const CcfCode& f, const IndexSet& c, const Multitree& t1,
                          const Multitree& t2, std::size_t depth) {
    require_compatible(f, t1, depth);
    require_compatible(f, t2, depth);
    std::vector<BrickPoint> points = brick_quotient(t1, depth);
    auto more = brick_quotient(t2, depth);
    points.insert(points.end(), more.begin(), more.end());
    return reduced_over(f, c, points);
}

bool reduced_to_map(const CcfCode& f, const CcfCode& g, const Multitree& t, std::size_t depth) {
    require_compatible(f, t, depth);
    require_compatible(g, t, depth);
    std::map<Bits, Bits> groups;
    for (const BrickPoint& x : brick_quotient(t, depth)) {
        Bits key = eval_code(g, x);
        Bits value = eval_code(f, x);
        auto [it, inserted] = groups.emplace(std::move(key), value);
        if (!inserted && it->second != value) return false;
    }
    return true;
}

bool captures(const CcfCode& f, int alpha, const Multitree& t, std::size_t depth) {
    require_compatible(f, t, depth);
    if (!f.base().count(alpha))
        fail(Errc::IndexOutsideBase, "captured index " + std::to_string(alpha) + " outside base");
    std::map<Bits, Bits> groups;
    for (const BrickPoint& x : brick_quotient(t, depth)) {
        Bits key = eval_code(f, x);
        auto [it, inserted] = groups.emplace(std::move(key), x.at(alpha));
        if (!inserted && it->second != x.at(alpha)) return false;
    }
    return true;
}

std::optional<Bits> is_simple(const CcfCode& f, int xi, const Multitree& t, std::size_t depth) {
    require_compatible(f, t, depth);
    if (!f.base().count(xi))
        fail(Errc::IndexOutsideBase, "index " + std::to_string(xi) + " outside base");
    if (depth < f.horizon())
        fail(Errc::InsufficientDepth, "depth below the code's output horizon");
    auto points = brick_quotient(t, depth);
    for (const Bits& sigma : all_strings_upto(f.horizon())) {
        bool fits = true;
        for (const BrickPoint& x : points)
            if (eval_code(f, x) != act_on_point(sigma, x.at(xi)).prefix(f.horizon())) {
                fits = false;
                break;
            }
        if (fits) return sigma;
    }
    return std::nullopt;
}

std::set<Bits> image_set(const CcfCode& f, const Multitree& t, std::size_t depth) {
    require_compatible(f, t, depth);
    std::set<Bits> out;
    for (const BrickPoint& x : brick_quotient(t, depth)) out.insert(eval_code(f, x));
    return out;
}

CcfCode code_from_table(const IndexSet& base, std::size_t input_depth, std::size_t horizon,
                        const std::function<Bits(const BrickPoint&)>& table) {
    Multitree full;
    for (int xi : base) full = full.with(xi, LargeTree::cohen());
    std::vector<CcfCode::Cell> cells(horizon);
    for (const BrickPoint& x : brick_quotient(full, input_depth)) {
        Bits value = table(x);
        if (value.size() < horizon)
            fail(Errc::PreconditionFailed, "table value shorter than the horizon");
        std::map<int, LargeTree> entries;
        for (const auto& [xi, bits] : x.coords) entries.emplace(xi, LargeTree::around(bits));
        Multitree cell_tree(std::move(entries));
        for (std::size_t k = 0; k < horizon; ++k) {
            if (value.at(k))
                cells[k].u1.push_back(cell_tree);
            else
                cells[k].u0.push_back(cell_tree);
        }
    }
    CcfCode code(base, std::move(cells));
    ensure(validate_code(code).valid, Errc::InternalCheckFailed,
           "tabulated code failed validation");
    for (const BrickPoint& x : brick_quotient(full, std::max(input_depth, std::size_t{1})))
        ensure(eval_code(code, x) == table(x).prefix(horizon), Errc::InternalCheckFailed,
               "tabulated code does not reproduce its table");
    return code;
}

namespace {

bool images_disjoint(const CcfCode& f, const Multitree& a, const Multitree& b,
                     std::size_t depth) {
    std::set<Bits> ia = image_set(f, a, depth);
    for (const Bits& w : image_set(f, b, depth))
        if (ia.count(w)) return false;
    return true;
}

// The exactness depth for the pair (f, g): deep enough for both codes'
// defining stems and output horizons. The caller's depth parameter only
// budgets searches; reductions and images are always judged here.
std::size_t eval_depth(const CcfCode& f, const CcfCode& g) {
    return std::max({std::size_t{1}, f.max_dependence_depth(), g.max_dependence_depth(),
                     f.horizon(), g.horizon()});
}

// Condition (1) at level m for the map h: B∖{φ(m)}-reduction holds on the
// σ-piece, or on none of its split shrinks within the search budget. The
// budget matters: a finite-horizon code is constant on deep enough cells,
// so an unbounded search would trivialize every coordinate stream.
bool condition_one(const Multitree& t, std::size_t m, const CcfCode& h, const Scheduler& sched,
                   std::size_t d, std::size_t budget) {
    int alpha = sched.phi(m);
    IndexSet rest = minus(t.base(), alpha);
    for (const Bits& sigma : all_strings(m)) {
        Multitree piece = mt_split(t, sigma, sched);
        if (reduced_to_set(h, rest, piece, d)) continue;
        for (const Bits& w : all_strings_upto(budget))
            if (reduced_to_set(h, rest, mt_split(piece, w, sched), d)) return false;
    }
    return true;
}

bool condition_two(const Multitree& t, std::size_t m, const CcfCode& h, const Scheduler& sched,
                   std::size_t d) {
    for (const Bits& sigma : all_strings(m))
        for (const Bits& tau : all_strings(m)) {
            Multitree x = mt_split(t, sigma, sched);
            Multitree y = mt_split(t, tau, sched);
            if (images_disjoint(h, x, y, d)) continue;
            if (!reduced_to_set_union(h, d_set(sigma, tau, sched), x, y, d)) return false;
        }
    return true;
}

// The stage that establishes condition (1) at the given level: wherever a
// split shrink is reduced, complete with it. Each completion makes the
// piece permanently reduced, so the loop reaches a fixpoint.
Multitree stage_one(Multitree s, std::size_t level, const CcfCode& h, const Scheduler& sched,
                    std::size_t d, std::size_t budget) {
    int alpha = sched.phi(level);
    IndexSet rest = minus(s.base(), alpha);
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Bits& sigma : all_strings(level)) {
            Multitree piece = mt_split(s, sigma, sched);
            if (reduced_to_set(h, rest, piece, d)) continue;
            for (const Bits& w : all_strings_upto(budget)) {
                if (w.empty()) continue;
                Multitree cand = mt_split(piece, w, sched);
                if (reduced_to_set(h, rest, cand, d)) {
                    s = mt_complete(s, sigma, cand, sched);
                    changed = true;
                    break;
                }
            }
        }
    }
    return s;
}

// The stage that establishes condition (2) at level m+1 for h: for every
// pair σ⌢0, τ⌢1 either the D[σ',τ']-reduction already holds on the union,
// or a component surgery forces disjoint images.
Multitree stage_two(Multitree s, std::size_t m, const CcfCode& h, const Scheduler& sched,
                    std::size_t d, std::size_t budget) {
    int eta0 = sched.phi(m);
    for (const Bits& sigma : all_strings(m))
        for (const Bits& tau : all_strings(m)) {
            Bits sp = sigma.concat(Bits::one(0));
            Bits tp = tau.concat(Bits::one(1));
            Multitree x = mt_split(s, sp, sched);
            Multitree y = mt_split(s, tp, sched);
            if (images_disjoint(h, x, y, d)) continue;
            if (reduced_to_set_union(h, d_set(sp, tp, sched), x, y, d)) continue;

            // Pick a cell of [S(⇒σ')] and its forced counterpart in
            // [S(⇒τ')]: components off η₀ are tied by the Lemma 5.3 shifts,
            // only the η₀ node is free.
            bool done = false;
            for (const BrickPoint& x0 : brick_quotient(x, d)) {
                BrickPoint y0;
                bool assembled = true;
                for (int eta : s.base()) {
                    if (eta == eta0) continue;
                    Bits route_s = sub_string(sp, eta, sched);
                    Bits route_t = sub_string(tp, eta, sched);
                    if (route_s == route_t) {
                        y0.coords[eta] = x0.at(eta);
                    } else {
                        Bits shift = shift_between_splits(s.at(eta), route_t, route_s);
                        if (shift.size() > d) {
                            assembled = false;
                            break;
                        }
                        y0.coords[eta] = act_on_point(shift, x0.at(eta));
                    }
                }
                if (!assembled) continue;
                Bits fx = eval_code(h, x0);
                for (const Bits& wnode : y.at(eta0).nodes_at(d)) {
                    y0.coords[eta0] = wnode;
                    if (eval_code(h, y0) == fx) continue;
                    // component surgery
                    std::map<int, LargeTree> entries;
                    for (int eta : s.base()) {
                        if (eta == eta0) continue;
                        Bits route_s = sub_string(sp, eta, sched);
                        LargeTree piece = truncate(x.at(eta), x0.at(eta)).tree;
                        entries.emplace(eta, lemma54_complete(s.at(eta), route_s, piece));
                    }
                    LargeTree u_piece = truncate(x.at(eta0), x0.at(eta0)).tree;
                    LargeTree v_piece = truncate(y.at(eta0), wnode).tree;
                    entries.emplace(eta0, lemma55_join(s.at(eta0), sub_string(sigma, eta0, sched),
                                                       sub_string(tau, eta0, sched), u_piece,
                                                       v_piece, std::max(d, budget)));
                    Multitree q(std::move(entries));
                    ensure(mt_refines(q, s, m + 1, sched), Errc::InternalCheckFailed,
                           "surgery result does not ≤_{m+1}-refine");
                    ensure(images_disjoint(h, mt_split(q, sp, sched), mt_split(q, tp, sched), d),
                           Errc::InternalCheckFailed, "surgery did not separate the images");
                    s = q;
                    done = true;
                    break;
                }
                if (done) break;
            }
            if (!done)
                fail(Errc::DepthExhausted,
                     "no separating cell pair within depth at σ' = " + sp.str() +
                         ", τ' = " + tp.str());
        }
    return s;
}

}  // namespace

bool is_m_good(const Multitree& t, std::size_t m, const CcfCode& f, const CcfCode& g,
               const LazySubmf& submf, const Scheduler& sched, std::size_t depth) {
    (void)submf;
    std::size_t d = eval_depth(f, g);
    return condition_one(t, m, f, sched, d, depth) && condition_one(t, m, g, sched, d, depth) &&
           condition_two(t, m, f, sched, d) && condition_two(t, m, g, sched, d);
}

Multitree make_zero_good(const Multitree& t, const CcfCode& f, const CcfCode& g,
                         const LazySubmf& submf, const Scheduler& sched, std::size_t depth) {
    std::size_t d = eval_depth(f, g);
    Multitree s = stage_one(t, 0, f, sched, d, depth);
    s = stage_one(s, 0, g, sched, d, depth);
    ensure(is_m_good(s, 0, f, g, submf, sched, depth), Errc::DepthExhausted,
           "could not reach a 0-good multitree within depth");
    return s;
}

Multitree good_refine(const Multitree& t, std::size_t m, const CcfCode& f, const CcfCode& g,
                      const LazySubmf& submf, const Scheduler& sched, std::size_t depth) {
    if (!is_m_good(t, m, f, g, submf, sched, depth))
        fail(Errc::NotGood, "good_refine requires an m-good multitree");
    std::size_t d = eval_depth(f, g);
    Multitree s = stage_one(t, m + 1, f, sched, d, depth);
    s = stage_one(s, m + 1, g, sched, d, depth);
    s = stage_two(s, m, f, sched, d, depth);
    s = stage_two(s, m, g, sched, d, depth);
    // the surgeries may open new reduced shrinks; condition (2) is stable
    // under further completions, so re-running stage one closes (1)
    s = stage_one(s, m + 1, f, sched, d, depth);
    s = stage_one(s, m + 1, g, sched, d, depth);
    ensure(mt_refines(s, t, m + 1, sched), Errc::InternalCheckFailed,
           "good_refine result does not ≤_{m+1}-refine its input");
    ensure(is_m_good(s, m + 1, f, g, submf, sched, depth), Errc::DepthExhausted,
           "refinement did not reach m+1-goodness within depth");
    return s;
}

Dichotomy classify_dichotomy(const Multitree& t, const CcfCode& f, const CcfCode& g,
                             const LazySubmf& submf, const Scheduler& sched, std::size_t budget,
                             std::size_t depth) {
    Dichotomy out;
    std::size_t d = eval_depth(f, g);
    out.depth = d;
    try {
        out.chain.push_back(make_zero_good(t, f, g, submf, sched, depth));
        for (std::size_t m = 0; m < budget; ++m)
            out.chain.push_back(good_refine(out.chain.back(), m, f, g, submf, sched, depth));
    } catch (const CalcError&) {
        out.kind = Dichotomy::Kind::Exhausted;
        return out;
    }
    const Multitree& s = out.chain.back();

    // Case 2 of the dichotomy: a pair with disjoint f-images on which g is
    // reduced to the untouched indices; the least such level wins.
    for (std::size_t m = 0; m < budget; ++m) {
        int eta0 = sched.phi(m);
        for (const Bits& sigma : all_strings(m))
            for (const Bits& tau : all_strings(m))
                for (int flip = 0; flip < 2; ++flip) {
                    Bits sp = sigma.concat(Bits::one(flip));
                    Bits tp = tau.concat(Bits::one(1 - flip));
                    Multitree x = mt_split(s, sp, sched);
                    Multitree y = mt_split(s, tp, sched);
                    if (!images_disjoint(f, x, y, d)) continue;
                    if (!reduced_to_set_union(g, d_set(sp, tp, sched), x, y, d)) continue;
                    Multitree witness = mt_split(s, sigma, sched);
                    if (captures(f, eta0, witness, d) &&
                        reduced_to_set(g, minus(s.base(), eta0), witness, d)) {
                        out.kind = Dichotomy::Kind::Captured;
                        out.witness = witness;
                        out.eta = eta0;
                        return out;
                    }
                }
    }

    if (reduced_to_map(f, g, s, d)) {
        out.kind = Dichotomy::Kind::Reduced;
        out.witness = s;
        return out;
    }
    out.kind = Dichotomy::Kind::Exhausted;
    return out;
}

std::pair<Multitree, LargeTree> separate_image(const Multitree& t, std::size_t m,
                                               const LargeTree& u, std::size_t n, const CcfCode& f,
                                               const ForcingSet& p, const LazySubmf& submf,
                                               const Scheduler& sched) {
    if (!mt_is_collage(t, m, submf, sched))
        fail(Errc::NotACollage, "separate_image requires an m-collage multitree");
    if (!is_collage(u, n, p))
        fail(Errc::NotACollage, "separate_image requires an n-collage tree");
    std::size_t depth = std::max<std::size_t>(1, f.max_dependence_depth());

    Multitree cur = t;
    LargeTree target = u;
    for (const Bits& gate : all_strings(m))
        for (const Bits& sel : all_strings(n)) {
            Multitree piece = mt_split(cur, gate, sched);
            LargeTree us = split(target, sel);
            auto points = brick_quotient(piece, depth);
            bool separated = true;
            for (const BrickPoint& x : points)
                if (us.member(eval_code(f, x))) {
                    separated = false;
                    break;
                }
            if (separated) continue;

            const BrickPoint& x0 = points.front();
            Bits fx = eval_code(f, x0);
            std::size_t cap = std::max(us.explicit_end(), f.horizon()) + 1;
            std::optional<Bits> pick;
            for (const Bits& node : us.nodes_upto(cap))
                if (!node.comparable(fx)) {
                    pick = node;
                    break;
                }
            if (!pick)
                fail(Errc::SeparationImpossible,
                     "every node of U(→" + sel.str() + ") meets the image at the horizon");
            target = lemma54_complete(target, sel, truncate(us, *pick).tree);

            std::map<int, LargeTree> entries;
            for (const auto& [xi, tree] : piece.entries())
                entries.emplace(xi, truncate(tree, x0.at(xi)).tree);
            cur = mt_complete(cur, gate, Multitree(std::move(entries)), sched);
        }

    for (const BrickPoint& x : brick_quotient(cur, depth))
        ensure(!target.member(eval_code(f, x)), Errc::InternalCheckFailed,
               "image still meets the tree after separation");
    ensure(mt_refines(cur, t, m, sched), Errc::InternalCheckFailed, "T' does not ≤_m-refine T");
    ensure(refines(target, u, n), Errc::InternalCheckFailed, "U' does not ⊆_n-refine U");
    ensure(mt_is_collage(cur, m, submf, sched), Errc::InternalCheckFailed,
           "T' lost the collage property");
    ensure(is_collage(target, n, p), Errc::InternalCheckFailed, "U' lost the collage property");
    return {cur, target};
}

Multitree separate_diagonal(const Multitree& t, std::size_t m, int xi, const CcfCode& f,
                            const LazySubmf& submf, const Scheduler& sched) {
    if (!mt_is_collage(t, m, submf, sched))
        fail(Errc::NotACollage, "separate_diagonal requires an m-collage multitree");
    std::size_t depth = std::max({std::size_t{1}, f.max_dependence_depth(), f.horizon()});
    for (const Bits& r : all_strings(m))
        if (is_simple(f, xi, mt_split(t, r, sched), depth))
            fail(Errc::SimpleSomewhere, "f is simple for ξ on T(⇒" + r.str() + ")");

    Multitree cur = t;
    for (const Bits& r : all_strings(m))
        for (const Bits& s : all_strings(m)) {
            Multitree tr = mt_split(cur, r, sched);
            Multitree ts = mt_split(cur, s, sched);
            auto points = brick_quotient(tr, depth);
            bool separated = true;
            for (const BrickPoint& x : points)
                if (ts.at(xi).member(eval_code(f, x))) {
                    separated = false;
                    break;
                }
            if (separated) continue;

            Bits tau = shift_between_splits(cur.at(xi), sub_string(s, xi, sched),
                                            sub_string(r, xi, sched));
            if (tau.size() > depth)
                fail(Errc::DepthExhausted, "shift longer than the working depth");

            std::optional<BrickPoint> found;
            Bits fx, moved;
            for (const BrickPoint& x : points) {
                Bits value = eval_code(f, x);
                Bits image = act_on_point(tau, x.at(xi));
                if (value != image.prefix(f.horizon())) {
                    found = x;
                    fx = value;
                    moved = image;
                    break;
                }
            }
            if (!found)
                fail(Errc::DepthExhausted,
                     "f agrees with the τ-shifted coordinate on every cell at this depth");

            std::size_t diff = 0;
            while (fx.at(diff) == moved.at(diff)) ++diff;
            std::size_t len = std::max(tau.size(), diff) + 1;
            if (len > std::min(fx.size(), moved.size()))
                fail(Errc::DepthExhausted, "separating strings exceed the horizon");
            // v ⊂ f(x₀) and w ⊂ τ·x₀(ξ) differ, so pinning the cell of x₀
            // forces the ξ-coordinate of the s-piece away from the image.
            std::map<int, LargeTree> entries;
            for (const auto& [eta, tree] : tr.entries())
                entries.emplace(eta, truncate(tree, found->at(eta)).tree);
            cur = mt_complete(cur, r, Multitree(std::move(entries)), sched);

            Multitree check_s = mt_split(cur, s, sched);
            for (const BrickPoint& x : brick_quotient(mt_split(cur, r, sched), depth))
                ensure(!check_s.at(xi).member(eval_code(f, x)), Errc::InternalCheckFailed,
                       "pair (" + r.str() + "," + s.str() + ") still meets the image");
        }

    for (const BrickPoint& x : brick_quotient(cur, depth))
        ensure(!cur.at(xi).member(eval_code(f, x)), Errc::InternalCheckFailed,
               "diagonal separation failed the final check");
    ensure(mt_refines(cur, t, m, sched), Errc::InternalCheckFailed, "T' does not ≤_m-refine T");
    ensure(mt_is_collage(cur, m, submf, sched), Errc::InternalCheckFailed,
           "T' lost the collage property");
    return cur;
}

}  // namespace ltcalc
