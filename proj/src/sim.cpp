#include "rtevo/sim.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace rtevo {

namespace {

constexpr Ticks kNever = INT64_MAX;

// Release bookkeeping for one message. Instance 0 (offset + first_jitter)
// and the periodic tail (offset + j*T + later_jitter) are merged in time
// order; within a message, queued instances transmit FIFO by release time.
struct MsgState {
    const Message* msg = nullptr;
    Scenario::PerMessage pat;
    bool first_released = false;
    std::int64_t next_periodic = 1;

    struct Ready {
        std::int64_t instance;
        Ticks nominal;
    };
    std::deque<Ready> ready;

    Ticks first_release() const {
        return pat.offset + pat.first_jitter;
    }
    Ticks periodic_release(std::int64_t j) const {
        Ticks shift, rel;
        if (__builtin_mul_overflow(j, msg->t, &shift) ||
            __builtin_add_overflow(pat.offset + pat.later_jitter, shift, &rel))
            return kNever;
        return rel;
    }
    Ticks next_release() const {
        Ticks t = kNever;
        if (!first_released)
            t = first_release();
        return std::min(t, periodic_release(next_periodic));
    }
    void release_due(Ticks now, Ticks horizon) {
        while (true) {
            Ticks fr = first_released ? kNever : first_release();
            Ticks pr = periodic_release(next_periodic);
            Ticks next = std::min(fr, pr);
            if (next > now || next >= horizon)
                return;
            if (fr <= pr) {
                ready.push_back({0, pat.offset});
                first_released = true;
            } else {
                ready.push_back({next_periodic, pat.offset + next_periodic * msg->t});
                ++next_periodic;
            }
        }
    }
};

} // namespace

SimResult simulate(const MessageSet& set, const Scenario& scenario,
                   const SimOptions& opts) {
    if (scenario.entries.size() != set.size())
        throw Error(Errc::invalid_config,
                    "scenario entry count does not match set");
    if (scenario.horizon < 1)
        throw Error(Errc::invalid_config, "horizon must be >= 1");
    if (scenario.horizon > opts.horizon_cap)
        throw Error(Errc::horizon_too_large,
                    std::to_string(scenario.horizon) + " > cap " +
                        std::to_string(opts.horizon_cap));

    std::vector<MsgState> st(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        const Message& m = set.at(i);
        const Scenario::PerMessage& p = scenario.entries[i];
        if (p.offset < 0 || p.offset >= m.t)
            throw Error(Errc::invalid_config,
                        "offset out of [0, T) for '" + m.id + "'");
        if (p.first_jitter < 0 || p.first_jitter > m.j || p.later_jitter < 0 ||
            p.later_jitter > m.j)
            throw Error(Errc::invalid_config,
                        "jitter out of [0, J] for '" + m.id + "'");
        st[i].msg = &m;
        st[i].pat = p;
    }

    SimResult result;
    result.per_message.resize(set.size());

    const Ticks horizon = scenario.horizon;
    Ticks now = 0;
    while (true) {
        for (MsgState& s : st)
            s.release_due(now, horizon);

        // Highest priority queued frame; messages are already priority-sorted.
        std::size_t pick = set.size();
        for (std::size_t i = 0; i < st.size(); ++i) {
            if (!st[i].ready.empty()) {
                pick = i;
                break;
            }
        }
        if (pick == set.size()) {
            // Bus idle: jump to the next release, if any remains in range.
            Ticks next = kNever;
            for (const MsgState& s : st)
                next = std::min(next, s.next_release());
            if (next >= horizon)
                break;
            now = std::max(now, next);
            continue;
        }

        MsgState::Ready inst = st[pick].ready.front();
        Ticks completion = now + st[pick].msg->c;
        if (completion > horizon)
            break; // in flight at the horizon; everything behind it is too
        st[pick].ready.pop_front();

        Ticks response = completion - inst.nominal;
        auto& pm = result.per_message[pick];
        pm.watermark = std::max(pm.watermark, response);
        pm.instances += 1;
        if (response > st[pick].msg->d && !result.first_miss)
            result.first_miss =
                SimResult::Miss{pick, inst.instance, inst.nominal};
        if (opts.record_trace)
            result.trace.push_back(
                {pick, inst.instance, inst.nominal, now, completion});
        now = completion;
    }
    return result;
}

Scenario critical_instant_scenario(const MessageSet& set, Ticks horizon) {
    Scenario s;
    s.horizon = horizon;
    s.entries.resize(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        s.entries[i].offset = 0;
        s.entries[i].first_jitter = set.at(i).j;
        s.entries[i].later_jitter = 0;
    }
    return s;
}

HorizonInfo default_horizon(const MessageSet& set, Ticks max_offset) {
    constexpr Ticks kCap = 10'000'000;
    Ticks lcm = 1;
    bool over = false;
    for (const Message& m : set.messages()) {
        if (m.t > kCap) {
            over = true;
            break;
        }
        lcm = lcm / std::gcd(lcm, m.t) * m.t; // both factors <= kCap here
        if (lcm > kCap) {
            over = true;
            break;
        }
    }
    Ticks max_j = 0;
    for (const Message& m : set.messages())
        max_j = std::max(max_j, m.j);

    if (over)
        return {kCap, true};
    Ticks h = 2 * lcm + max_offset + max_j;
    if (h > kCap)
        return {kCap, true};
    return {std::max<Ticks>(h, 1), false};
}

} // namespace rtevo
