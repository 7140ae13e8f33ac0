#pragma once

#include <string>
#include <vector>

#include "rtevo/model.hpp"
#include "oracles.hpp"

namespace testutil {

struct MsgDef {
    long long c, t, d, j;
};

// Builds a MessageSet with priorities 1..n in the given order.
inline rtevo::MessageSet make_set(const std::vector<MsgDef>& specs) {
    std::vector<rtevo::Message> msgs;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        rtevo::Message m;
        m.id = "m" + std::to_string(i + 1);
        m.priority = static_cast<int>(i + 1);
        m.c = specs[i].c;
        m.t = specs[i].t;
        m.d = specs[i].d;
        m.j = specs[i].j;
        msgs.push_back(std::move(m));
    }
    return rtevo::MessageSet::validate(std::move(msgs));
}

inline std::vector<oracle::Msg> to_oracle(const rtevo::MessageSet& set) {
    std::vector<oracle::Msg> out;
    for (const rtevo::Message& m : set.messages())
        out.push_back({m.c, m.t, m.d, m.j});
    return out;
}

// The worked two-message set: m1 hi {C=1,T=4,D=4,J=0}, m2 lo {C=2,T=10,D=10,J=0}.
inline rtevo::MessageSet micro_set() {
    return make_set({{1, 4, 4, 0}, {2, 10, 10, 0}});
}

} // namespace testutil
