#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rtevo/model.hpp"

namespace rtevo {

// A concrete release pattern driving the bus: per-message offset plus a
// jitter realization for the first instance and one for all later instances
// (first maximally late + successors maximally early is the densest pattern
// a jitter bound J allows).
struct Scenario {
    struct PerMessage {
        Ticks offset = 0;       // in [0, T_i)
        Ticks first_jitter = 0; // in [0, J_i]
        Ticks later_jitter = 0; // in [0, J_i]
    };
    std::vector<PerMessage> entries; // indexed like MessageSet (priority order)
    Ticks horizon = 1;
};

struct TraceEvent {
    std::size_t msg_index = 0;
    std::int64_t instance = 0;
    Ticks nominal = 0;
    Ticks start = 0;
    Ticks completion = 0;
};

struct SimResult {
    struct PerMessage {
        Ticks watermark = 0; // max(completion - nominal); valid iff instances > 0
        std::int64_t instances = 0;
    };
    struct Miss {
        std::size_t msg_index = 0;
        std::int64_t instance = 0;
        Ticks nominal = 0;
    };

    std::vector<PerMessage> per_message;
    std::optional<Miss> first_miss;
    std::vector<TraceEvent> trace; // populated only when requested
};

struct SimOptions {
    bool record_trace = false;
    Ticks horizon_cap = 10'000'000;
};

// Non-preemptive fixed-priority bus: whenever the bus is idle the
// highest-priority queued frame transmits C_i ticks uninterruptibly; ties at
// identical enqueue instants resolve by priority. Response time of an
// instance is completion minus nominal release (jitter counts toward the
// response). Frames still in flight at the horizon are excluded.
SimResult simulate(const MessageSet& set, const Scenario& scenario,
                   const SimOptions& opts = {});

// All offsets zero, first instance released J_i late, successors on time.
Scenario critical_instant_scenario(const MessageSet& set, Ticks horizon);

struct HorizonInfo {
    Ticks horizon = 1;
    bool clamped = false;
};

// 2 * lcm(T_i) + max_offset + max(J_i), clamped to the 1e7 cap.
HorizonInfo default_horizon(const MessageSet& set, Ticks max_offset = 0);

} // namespace rtevo
