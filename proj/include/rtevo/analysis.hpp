#pragma once

#include <string>
#include <vector>

#include "rtevo/model.hpp"

namespace rtevo {

enum class RtKind {
    converged,         // r is a true fixed point of the defining recurrence
    exceeded_cap,      // no fixed point within cap/limit, verdict unknown
    exceeded_deadline, // no fixed point, but r = first iterate past D_i
                       // certifies the miss (iterates are lower bounds)
};

struct RtVerdict {
    RtKind kind = RtKind::exceeded_cap;
    Ticks r = 0; // valid for converged and exceeded_deadline
    int iterations = 0;

    bool converged() const { return kind == RtKind::converged; }
    bool schedulable(Ticks d) const { return converged() && r <= d; }
};

const char* rt_kind_name(RtKind k);

// B_i: longest transmission time among lower-priority messages (0 if none).
Ticks blocking_term(const MessageSet& set, std::size_t idx);

// Sufficient test S1: fixed-point iteration of
//   R = J_i + C_i + max(B_i, C_i)
//       + sum_{k in hp(i)} (floor((R - J_i - C_i + J_k) / T_k) + 1) * C_k
// from R0 = J_i + C_i, mathematical floor for negative numerators.
RtVerdict rta_s1(const MessageSet& set, std::size_t idx,
                 const AnalysisConfig& cfg);

// Closed-form variant: the numerator uses D_i in place of the iterate.
RtVerdict rta_closed_d(const MessageSet& set, std::size_t idx);

// Further simplified closed form: numerator D_i + J_k.
RtVerdict rta_closed_simple(const MessageSet& set, std::size_t idx);

// Exact busy-period analysis for the non-preemptive bus:
//   (a) busy period t = B_i + sum_{k in hp(i) + {i}} ceil((t + J_k)/T_k) * C_k
//   (b) Q = ceil((t + J_i)/T_i) instances fall inside it
//   (c) w(q) = B_i + q*C_i
//              + sum_{k in hp(i)} ceil((w + J_k + tau_bit)/T_k) * C_k
//       R(q) = J_i + w(q) - q*T_i + C_i
//   (d) result = max over q in [0, Q).
RtVerdict rta_exact(const MessageSet& set, std::size_t idx,
                    const AnalysisConfig& cfg);

// Id-based overloads; throw UnknownMessage for unknown ids.
RtVerdict rta_s1(const MessageSet& set, const std::string& id,
                 const AnalysisConfig& cfg);
RtVerdict rta_closed_d(const MessageSet& set, const std::string& id);
RtVerdict rta_closed_simple(const MessageSet& set, const std::string& id);
RtVerdict rta_exact(const MessageSet& set, const std::string& id,
                    const AnalysisConfig& cfg);
Ticks blocking_term(const MessageSet& set, const std::string& id);

enum class TestKind { exact, s1, closed_d, closed_simple };

const char* test_kind_name(TestKind k);

struct SetReport {
    struct Row {
        std::string id;
        Ticks d = 0;
        RtVerdict exact, s1, cf_d, cf_s;

        const RtVerdict& verdict(TestKind k) const;
    };

    std::vector<Row> rows;

    // True iff every message converged with r <= d under the given test.
    bool set_schedulable(TestKind k) const;
};

// Runs all four tests for every message in the set.
SetReport analyze_set(const MessageSet& set, const AnalysisConfig& cfg);

} // namespace rtevo
