#include "rtevo/analysis.hpp"

#include <algorithm>

namespace rtevo {

const char* rt_kind_name(RtKind k) {
    switch (k) {
    case RtKind::converged: return "converged";
    case RtKind::exceeded_cap: return "exceeded_cap";
    case RtKind::exceeded_deadline: return "exceeded_deadline";
    }
    return "?";
}

const char* test_kind_name(TestKind k) {
    switch (k) {
    case TestKind::exact: return "exact";
    case TestKind::s1: return "s1";
    case TestKind::closed_d: return "cf-d";
    case TestKind::closed_simple: return "cf-s";
    }
    return "?";
}

Ticks blocking_term(const MessageSet& set, std::size_t idx) {
    Ticks b = 0;
    for (const Message& m : set.lp(idx))
        b = std::max(b, m.c);
    return b;
}

namespace {

// One application of the S1 recurrence at iterate r.
Ticks s1_step(const MessageSet& set, std::size_t idx, Ticks b, Ticks r) {
    const Message& mi = set.at(idx);
    Ticks acc = checked_add(checked_add(mi.j, mi.c), std::max(b, mi.c));
    for (const Message& mk : set.hp(idx)) {
        Ticks num = checked_add(checked_sub(checked_sub(r, mi.j), mi.c), mk.j);
        Ticks inst = checked_add(floor_div(num, mk.t), 1);
        acc = checked_add(acc, checked_mul(inst, mk.c));
    }
    return acc;
}

// Shared monotone fixed-point driver. The recurrences here are
// non-decreasing in the iterate, so equality detection is sound and iterates
// are lower bounds of the least fixed point: the first iterate past
// `deadline` certifies unschedulability even when no fixed point is reached.
// Callers must express `deadline` in the iterate's own space (response space
// for S1, queueing-delay space for the exact test's inner loop).
template <typename Step>
RtVerdict iterate_monotone(Ticks r0, Ticks deadline, Ticks cap, int iter_limit,
                           Step step) {
    Ticks prev = r0;
    Ticks first_over_d = -1;
    int spent = 0;
    for (int m = 1; m <= iter_limit; ++m) {
        spent = m;
        Ticks next = step(prev);
        if (first_over_d < 0 && next > deadline)
            first_over_d = next;
        if (next == prev)
            return {RtKind::converged, next, m};
        if (next > cap)
            break;
        prev = next;
    }
    if (first_over_d >= 0)
        return {RtKind::exceeded_deadline, first_over_d, spent};
    return {RtKind::exceeded_cap, 0, spent};
}

constexpr Ticks kNoDeadline = INT64_MAX;

} // namespace

RtVerdict rta_s1(const MessageSet& set, std::size_t idx,
                 const AnalysisConfig& cfg) {
    const Message& mi = set.at(idx);
    const Ticks b = blocking_term(set, idx);
    const Ticks cap = cfg.cap_for(mi.d, mi.t);
    return iterate_monotone(checked_add(mi.j, mi.c), mi.d, cap, cfg.iter_limit,
                            [&](Ticks r) { return s1_step(set, idx, b, r); });
}

RtVerdict rta_closed_d(const MessageSet& set, std::size_t idx) {
    const Message& mi = set.at(idx);
    const Ticks b = blocking_term(set, idx);
    Ticks acc = checked_add(checked_add(mi.j, mi.c), std::max(b, mi.c));
    for (const Message& mk : set.hp(idx)) {
        Ticks num = checked_add(checked_sub(checked_sub(mi.d, mi.j), mi.c), mk.j);
        Ticks inst = checked_add(floor_div(num, mk.t), 1);
        acc = checked_add(acc, checked_mul(inst, mk.c));
    }
    return {RtKind::converged, acc, 1};
}

RtVerdict rta_closed_simple(const MessageSet& set, std::size_t idx) {
    const Message& mi = set.at(idx);
    const Ticks b = blocking_term(set, idx);
    Ticks acc = checked_add(checked_add(mi.j, mi.c), std::max(b, mi.c));
    for (const Message& mk : set.hp(idx)) {
        Ticks num = checked_add(mi.d, mk.j);
        Ticks inst = checked_add(floor_div(num, mk.t), 1);
        acc = checked_add(acc, checked_mul(inst, mk.c));
    }
    return {RtKind::converged, acc, 1};
}

RtVerdict rta_exact(const MessageSet& set, std::size_t idx,
                    const AnalysisConfig& cfg) {
    const Message& mi = set.at(idx);
    const Ticks b = blocking_term(set, idx);
    const Ticks cap = cfg.cap_for(mi.d, mi.t);

    // (a) length of the priority-level-i busy period.
    auto busy_step = [&](Ticks t) {
        Ticks acc = b;
        for (std::size_t k = 0; k <= idx; ++k) {
            const Message& mk = set.at(k);
            Ticks inst = ceil_div(checked_add(t, mk.j), mk.t);
            acc = checked_add(acc, checked_mul(inst, mk.c));
        }
        return acc;
    };
    // A long busy period says nothing about deadlines by itself, so no
    // deadline certificate can come out of stage (a).
    RtVerdict busy =
        iterate_monotone(mi.c, kNoDeadline, cap, cfg.iter_limit, busy_step);
    if (!busy.converged())
        return {RtKind::exceeded_cap, 0, busy.iterations};

    // (b) instances inside the busy period.
    const Ticks q_count = ceil_div(checked_add(busy.r, mi.j), mi.t);

    // (c)/(d) per-instance queueing delay and response; keep the maximum.
    Ticks best = 0;
    int iters = busy.iterations;
    for (Ticks q = 0; q < q_count; ++q) {
        const Ticks base = checked_add(b, checked_mul(q, mi.c));
        auto w_step = [&](Ticks w) {
            Ticks acc = base;
            for (const Message& mk : set.hp(idx)) {
                // ceil realizes the strict arbitration inequality: a frame
                // released tau_bit after the winner started cannot displace
                // it, one released at the decision instant can.
                Ticks num = checked_add(checked_add(w, mk.j), cfg.tau_bit);
                Ticks inst = ceil_div(num, mk.t);
                acc = checked_add(acc, checked_mul(inst, mk.c));
            }
            return acc;
        };
        // R(q) > D_i iff w > D_i - J_i - C_i + q*T_i, so hand the driver the
        // deadline translated into w-space and translate any certificate back.
        const Ticks d_w = checked_add(checked_sub(checked_sub(mi.d, mi.j), mi.c),
                                      checked_mul(q, mi.t));
        RtVerdict w = iterate_monotone(base, d_w, cap, cfg.iter_limit, w_step);
        if (!w.converged()) {
            if (w.kind == RtKind::exceeded_deadline) {
                Ticks r = checked_add(checked_sub(checked_add(mi.j, w.r),
                                                  checked_mul(q, mi.t)),
                                      mi.c);
                return {RtKind::exceeded_deadline, r, w.iterations};
            }
            return {RtKind::exceeded_cap, 0, w.iterations};
        }
        Ticks r = checked_add(checked_sub(checked_add(mi.j, w.r),
                                          checked_mul(q, mi.t)),
                              mi.c);
        best = std::max(best, r);
        iters += w.iterations;
    }
    return {RtKind::converged, best, iters};
}

RtVerdict rta_s1(const MessageSet& set, const std::string& id,
                 const AnalysisConfig& cfg) {
    return rta_s1(set, set.index_of(id), cfg);
}
RtVerdict rta_closed_d(const MessageSet& set, const std::string& id) {
    return rta_closed_d(set, set.index_of(id));
}
RtVerdict rta_closed_simple(const MessageSet& set, const std::string& id) {
    return rta_closed_simple(set, set.index_of(id));
}
RtVerdict rta_exact(const MessageSet& set, const std::string& id,
                    const AnalysisConfig& cfg) {
    return rta_exact(set, set.index_of(id), cfg);
}
Ticks blocking_term(const MessageSet& set, const std::string& id) {
    return blocking_term(set, set.index_of(id));
}

const RtVerdict& SetReport::Row::verdict(TestKind k) const {
    switch (k) {
    case TestKind::exact: return exact;
    case TestKind::s1: return s1;
    case TestKind::closed_d: return cf_d;
    case TestKind::closed_simple: return cf_s;
    }
    return exact;
}

bool SetReport::set_schedulable(TestKind k) const {
    for (const Row& row : rows) {
        if (!row.verdict(k).schedulable(row.d))
            return false;
    }
    return true;
}

SetReport analyze_set(const MessageSet& set, const AnalysisConfig& cfg) {
    cfg.check();
    SetReport report;
    report.rows.reserve(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        SetReport::Row row;
        row.id = set.at(i).id;
        row.d = set.at(i).d;
        row.exact = rta_exact(set, i, cfg);
        row.s1 = rta_s1(set, i, cfg);
        row.cf_d = rta_closed_d(set, i);
        row.cf_s = rta_closed_simple(set, i);
        report.rows.push_back(std::move(row));
    }
    return report;
}

} // namespace rtevo
