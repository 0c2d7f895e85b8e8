#include "ltcalc/mextension.hpp"

namespace ltcalc {

namespace {

void check_member(const LazySubmf& submf, const Multitree& t, const char* what) {
    for (const auto& [xi, tree] : t.entries()) {
        (void)tree;
        if (!submf.base().count(xi))
            fail(Errc::MalformedBundle,
                 std::string(what) + " uses index " + std::to_string(xi) + " outside the base");
    }
    if (!submf.contains(t))
        fail(Errc::MalformedBundle, std::string(what) + " is not a member of the multiforcing");
}

}  // namespace

MExtensionReport verify_mextension(const Multiforcing& p, const Multiforcing& q,
                                   const MExtensionBundle& bundle) {
    MExtensionReport report;
    report.sample_depth = bundle.sample_depth;
    LazySubmf lazy_p = LazySubmf::of(p);
    LazySubmf lazy_q = LazySubmf::of(q);

    // (A) same base, both small — smallness is automatic here.
    if (p.base() != q.base()) {
        report.a.pass = false;
        report.a.detail = "bases differ";
    }

    // (B) componentwise extension in the sense of Def 6.4, over the sampled
    // forcings and the supplied pre-dense sets.
    for (int xi : p.base()) {
        if (!q.has(xi)) continue;  // already reported under (A)
        std::vector<std::vector<LargeTree>> dense;
        if (auto it = bundle.dense_sets.find(xi); it != bundle.dense_sets.end())
            dense = it->second;
        try {
            ExtensionReport ext =
                is_extension(p.forcing(xi), q.forcing(xi), dense, bundle.sample_depth);
            if (!ext.holds) {
                report.b.pass = false;
                report.b.detail = "component " + std::to_string(xi) + ": " +
                                  (!ext.dense_below        ? "Q does not reach below P"
                                   : !ext.finitely_covered ? "a Q-tree is not finitely covered"
                                                           : "a supplied pre-dense set is missed");
                break;
            }
        } catch (const CalcError& e) {
            report.b.pass = false;
            report.b.detail = "component " + std::to_string(xi) + ": " + e.what();
            break;
        }
    }

    // (C) every listed 𝔖(P)-multitree has a Q-refinement that fd-covers the
    // supplied open dense sets.
    for (std::size_t i = 0; i < bundle.c_witnesses.size() && report.c.pass; ++i) {
        const auto& w = bundle.c_witnesses[i];
        check_member(lazy_p, w.t, "clause (C) multitree");
        check_member(lazy_q, w.s, "clause (C) witness");
        if (!w.s.leq(w.t)) {
            report.c.pass = false;
            report.c.detail = "witness " + std::to_string(i) + " is not ≤ its multitree";
            break;
        }
        for (std::size_t di = 0; di < w.open_dense.size(); ++di)
            if (!covers_fd(w.s, w.open_dense[di], true)) {
                report.c.pass = false;
                report.c.detail = "witness " + std::to_string(i) + " is not ⊆^fd-covered by set " +
                                  std::to_string(di);
                break;
            }
    }

    // (D) every listed coded map is a shifted coordinate copy on the
    // witness, or its image avoids the sampled component of Q.
    for (std::size_t i = 0; i < bundle.d_witnesses.size() && report.d.pass; ++i) {
        const auto& w = bundle.d_witnesses[i];
        check_member(lazy_p, w.t, "clause (D) multitree");
        check_member(lazy_q, w.s, "clause (D) witness");
        if (!w.t.has(w.xi))
            fail(Errc::MalformedBundle, "clause (D) index outside the multitree's base");
        if (w.s.base() != w.t.base() || w.code.base() != w.t.base())
            fail(Errc::MalformedBundle, "clause (D) bases must agree with the multitree");
        if (!w.s.leq(w.t)) {
            report.d.pass = false;
            report.d.detail = "witness " + std::to_string(i) + " is not ≤ its multitree";
            break;
        }
        std::size_t depth = std::max({std::size_t{1}, w.code.max_dependence_depth(),
                                      w.code.horizon()});
        if (w.branch == 1) {
            if (!is_simple(w.code, w.xi, w.s, depth)) {
                report.d.pass = false;
                report.d.detail =
                    "witness " + std::to_string(i) + ": the map is not a shifted copy";
            }
        } else if (w.branch == 2) {
            std::vector<LargeTree> sample = sample_forcing(q.forcing(w.xi), bundle.sample_depth);
            for (const BrickPoint& x : brick_quotient(w.s, depth)) {
                Bits value = eval_code(w.code, x);
                for (const LargeTree& u : sample)
                    if (u.member(value)) {
                        report.d.pass = false;
                        report.d.detail = "witness " + std::to_string(i) + ": image " +
                                          value.str() + " meets a sampled tree of Q(" +
                                          std::to_string(w.xi) + ")";
                        break;
                    }
                if (!report.d.pass) break;
            }
        } else {
            fail(Errc::MalformedBundle, "clause (D) branch flag must be 1 or 2");
        }
    }

    return report;
}

}  // namespace ltcalc
