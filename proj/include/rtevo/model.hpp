#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rtevo/error.hpp"
#include "rtevo/ticks.hpp"

namespace rtevo {

// One CAN frame's timing parameters. Priority 1 is the highest (matches CAN
// identifier semantics: smaller number wins arbitration).
struct Message {
    std::string id;
    int priority = 0;
    Ticks c = 0; // worst-case transmission time
    Ticks t = 0; // period
    Ticks d = 0; // relative deadline
    Ticks j = 0; // release jitter

    bool operator==(const Message&) const = default;
};

// A priority-ordered message set. Index 0 is the highest priority, so
// hp(i) is the prefix [0, i) and lp(i) the suffix (i, n).
// Immutable after validation; safe to share across workers.
class MessageSet {
public:
    // validate_message_set: sorts by priority (stable on input order),
    // rejects duplicate priorities and non-positive parameters. Messages
    // with d > t or c > d are accepted but flagged.
    static MessageSet validate(std::vector<Message> raw);

    const std::vector<Message>& messages() const { return msgs_; }
    std::size_t size() const { return msgs_.size(); }
    bool empty() const { return msgs_.empty(); }
    const Message& at(std::size_t idx) const { return msgs_[idx]; }

    // Index of the message with the given id; throws UnknownMessage.
    std::size_t index_of(const std::string& id) const;

    std::span<const Message> hp(std::size_t idx) const {
        return {msgs_.data(), idx};
    }
    std::span<const Message> lp(std::size_t idx) const {
        return {msgs_.data() + idx + 1, msgs_.size() - idx - 1};
    }

    // Ids of messages flagged during validation (d > t or c > d).
    const std::vector<std::string>& flagged() const { return flagged_; }

    bool operator==(const MessageSet& o) const { return msgs_ == o.msgs_; }

private:
    MessageSet() = default;

    std::vector<Message> msgs_;
    std::vector<std::string> flagged_;
};

// hp_set / lp_set by message id; the index spans above are the hot path.
std::vector<Message> hp_set(const MessageSet& set, const std::string& id);
std::vector<Message> lp_set(const MessageSet& set, const std::string& id);

struct Task {
    std::string id;
    Ticks wcet = 0;
    Ticks t = 0;
    Ticks d = 0;
    int priority = 0;

    bool operator==(const Task&) const = default;
};

// Directed communication; a cross-node edge becomes a CAN frame on the bus.
struct Edge {
    std::string src;
    std::string dst;
    Message frame;

    bool operator==(const Edge&) const = default;
};

class TaskGraph {
public:
    static TaskGraph validate(std::vector<Task> tasks, std::vector<Edge> edges);

    const std::vector<Task>& tasks() const { return tasks_; }
    const std::vector<Edge>& edges() const { return edges_; }
    std::size_t task_index(const std::string& id) const;

    // Ids of tasks violating wcet <= d <= t (accepted; they are simply
    // never schedulable).
    const std::vector<std::string>& flagged() const { return flagged_; }

private:
    TaskGraph() = default;

    std::vector<Task> tasks_;
    std::vector<Edge> edges_;
    std::vector<std::string> flagged_;
};

// Identical processors around one shared bus.
struct Platform {
    int node_count = 1;
};

struct AnalysisConfig {
    Ticks tau_bit = 1;  // arbitration granularity in the exact test
    int iter_limit = 256;
    Ticks cap_factor = 4; // divergence cap = cap_factor * max(D_i, T_i)

    Ticks cap_for(Ticks d, Ticks t) const {
        return checked_mul(cap_factor, d > t ? d : t);
    }

    void check() const {
        if (tau_bit < 0 || iter_limit < 1 || cap_factor < 1)
            throw Error(Errc::invalid_config, "analysis config out of range");
    }
};

} // namespace rtevo
