#pragma once

#include <optional>
#include <string>

#include "timdof/cycles.hpp"
#include "timdof/rational.hpp"
#include "timdof/scheme.hpp"

namespace timdof {

// alpha <= (1/2)(1 - 1/(m + 2 l_sigma)), exact.
inline Rational theorem1_bound_value(const CycleParams& p) {
    const std::int64_t d = p.m + 2LL * p.l_sigma;
    return Rational(d - 1, 2 * d);
}

struct HalfDofResult {
    bool feasible = false;
    bool c1_ok = false; // no internal conflicts
    bool c2_ok = false; // reduced graph has no odd cycle
    std::string reason;
};

// 1/2 DoF per user is achievable iff C1 and C2 both hold.
inline HalfDofResult half_dof_feasible(const GraphBundle& b) {
    HalfDofResult r;
    r.c1_ok = b.internal_conflicts.empty();
    r.c2_ok = b.reduced_bipartite;
    r.feasible = r.c1_ok && r.c2_ok;
    if (!r.c1_ok)
        r.reason = "C1 fails: internal conflict present";
    else if (!r.c2_ok)
        r.reason = "C2 fails: reduced graph has an odd cycle";
    else
        r.reason = "C1 and C2 hold";
    return r;
}

struct AnalyzeOptions {
    int max_cycle_len = 9;
    long long max_cycles = 100000;
    bool exhaustive = false; // lift the caps
};

struct BoundReport {
    GraphBundle bundle;
    bool half_dof_feasible = false;
    bool c1_ok = false;
    bool c2_ok = false;
    std::optional<Rational> theorem1_bound; // present iff an odd reduced cycle exists
    std::optional<CompletedCycle> certificate;
    bool possibly_not_tightest = false;
    std::string notes;
};

inline BoundReport analyze(const NetworkTopology& t, const AnalyzeOptions& opt = {}) {
    BoundReport rep;
    rep.bundle = build_bundle(t);
    const auto half = half_dof_feasible(rep.bundle);
    rep.half_dof_feasible = half.feasible;
    rep.c1_ok = half.c1_ok;
    rep.c2_ok = half.c2_ok;

    std::string notes;
    if (!rep.c2_ok) {
        const int n = rep.bundle.reduced_count();
        const int max_len = opt.exhaustive ? n : std::min(opt.max_cycle_len, n);
        const long long max_count =
            opt.exhaustive ? std::numeric_limits<long long>::max() : opt.max_cycles;
        auto cycles = enumerate_odd_cycles(n, rep.bundle.reduced_edges, max_len, max_count);
        rep.possibly_not_tightest = cycles.truncated;
        rep.certificate = optimize_completed_cycle(rep.bundle, cycles.cycles);
        rep.theorem1_bound = theorem1_bound_value(rep.certificate->params);
        notes += "odd cycle in reduced graph: symmetric DoF per user <= " +
                 rep.theorem1_bound->str() + " (m=" + std::to_string(rep.certificate->params.m) +
                 ", l_sigma=" + std::to_string(rep.certificate->params.l_sigma) + ").";
        if (rep.possibly_not_tightest)
            notes += " Cycle search was capped; a tighter completed cycle may exist.";
        if (rep.c1_ok && *rep.theorem1_bound == Rational(4, 9)) {
            auto four9 = build_four_ninths_scheme(rep.bundle);
            if (four9.feasible()) {
                auto v = validate_scheme_structure(*four9.scheme, t);
                if (v.pass)
                    notes += " A matching 3-slot scheme exists: optimal symmetric DoF per "
                             "user = 4/9.";
            }
        }
    }
    if (!rep.c1_ok) {
        if (!notes.empty()) notes += " ";
        notes += "Internal conflicts present: symmetric DoF strictly below 1/2 "
                 "(necessity of C1, external quantification out of scope).";
    }
    if (rep.half_dof_feasible) {
        notes += "Symmetric DoF 1/2 per user achievable (C1 and C2 hold).";
        if (!rep.bundle.conflict_edges.empty())
            notes += " Some conflict edge exists, so 1/2 is optimal.";
        else
            notes += " No conflict edges at all: each user attains 1 DoF trivially, so the "
                     "1/2-optimality claim is not asserted.";
    }
    rep.notes = notes;
    return rep;
}

} // namespace timdof
