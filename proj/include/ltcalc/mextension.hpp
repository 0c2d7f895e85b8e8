#pragma once

#include "ltcalc/code.hpp"

namespace ltcalc {

// Witnesses for the multiforcing-extension conditions. The transfinite
// quantifiers of the original definition ("all open dense sets in 𝔐")
// become the explicitly supplied lists; the report is honest about being
// relative to them.
struct MExtensionBundle {
    std::size_t sample_depth = 2;

    // clause (B): per index, pre-dense subsets of P(ξ) the extension must
    // respect
    std::map<int, std::vector<std::vector<LargeTree>>> dense_sets;

    // clause (C): a multitree of 𝔖(P) with a claimed refinement in MT(Q)
    // and the open dense sets it must finitely and disjointly cover
    struct CWitness {
        Multitree t;
        Multitree s;
        std::vector<std::vector<Multitree>> open_dense;
    };
    std::vector<CWitness> c_witnesses;

    // clause (D): a multitree, an index, a coded map, a claimed refinement
    // and which branch it takes — 1: f is a shifted coordinate copy on [S],
    // 2: the image of [S] avoids every component tree of Q(ξ)
    struct DWitness {
        Multitree t;
        int xi = 0;
        CcfCode code;
        Multitree s;
        int branch = 2;
    };
    std::vector<DWitness> d_witnesses;
};

struct ClauseReport {
    bool pass = true;
    std::string detail;
};

struct MExtensionReport {
    ClauseReport a, b, c, d;
    std::size_t sample_depth = 2;
    bool all() const { return a.pass && b.pass && c.pass && d.pass; }
};

// Checks Def-12.3-style extension conditions for explicit multiforcings
// against the supplied witness bundle. Structural defects in the bundle
// (unknown indices, mismatched bases) raise MalformedBundle.
MExtensionReport verify_mextension(const Multiforcing& p, const Multiforcing& q,
                                   const MExtensionBundle& bundle);

}  // namespace ltcalc
