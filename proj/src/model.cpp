#include "rtevo/model.hpp"

#include <algorithm>
#include <unordered_set>

namespace rtevo {

MessageSet MessageSet::validate(std::vector<Message> raw) {
    for (const Message& m : raw) {
        if (m.c < 1 || m.t < 1 || m.d < 1 || m.j < 0)
            throw Error(Errc::non_positive_parameter,
                        "message '" + m.id + "' requires c,t,d >= 1 and j >= 0");
        if (m.priority < 1)
            throw Error(Errc::non_positive_parameter,
                        "message '" + m.id + "' requires priority >= 1");
    }
    std::unordered_set<int> seen;
    for (const Message& m : raw) {
        if (!seen.insert(m.priority).second)
            throw Error(Errc::duplicate_priority,
                        "priority " + std::to_string(m.priority) +
                            " assigned more than once");
    }

    MessageSet set;
    set.msgs_ = std::move(raw);
    std::stable_sort(set.msgs_.begin(), set.msgs_.end(),
                     [](const Message& a, const Message& b) {
                         return a.priority < b.priority;
                     });
    for (const Message& m : set.msgs_) {
        if (m.d > m.t || m.c > m.d)
            set.flagged_.push_back(m.id);
    }
    return set;
}

std::size_t MessageSet::index_of(const std::string& id) const {
    for (std::size_t i = 0; i < msgs_.size(); ++i) {
        if (msgs_[i].id == id)
            return i;
    }
    throw Error(Errc::unknown_message, "no message with id '" + id + "'");
}

std::vector<Message> hp_set(const MessageSet& set, const std::string& id) {
    auto span = set.hp(set.index_of(id));
    return {span.begin(), span.end()};
}

std::vector<Message> lp_set(const MessageSet& set, const std::string& id) {
    auto span = set.lp(set.index_of(id));
    return {span.begin(), span.end()};
}

TaskGraph TaskGraph::validate(std::vector<Task> tasks, std::vector<Edge> edges) {
    std::unordered_set<int> prios;
    TaskGraph tg;
    for (const Task& t : tasks) {
        if (t.wcet < 1 || t.t < 1 || t.d < 1)
            throw Error(Errc::non_positive_parameter,
                        "task '" + t.id + "' requires wcet,t,d >= 1");
        if (t.wcet > t.d || t.d > t.t)
            tg.flagged_.push_back(t.id); // expressible, just never schedulable
        if (!prios.insert(t.priority).second)
            throw Error(Errc::duplicate_priority,
                        "task priority " + std::to_string(t.priority) +
                            " assigned more than once");
    }

    tg.tasks_ = std::move(tasks);
    std::unordered_set<int> frame_prios;
    for (const Edge& e : edges) {
        tg.task_index(e.src);
        tg.task_index(e.dst);
        if (e.frame.c < 1 || e.frame.t < 1 || e.frame.d < 1 || e.frame.j < 0 ||
            e.frame.priority < 1)
            throw Error(Errc::non_positive_parameter,
                        "frame '" + e.frame.id + "' parameter out of range");
        if (!frame_prios.insert(e.frame.priority).second)
            throw Error(Errc::duplicate_priority,
                        "frame priority " + std::to_string(e.frame.priority) +
                            " assigned more than once");
    }
    tg.edges_ = std::move(edges);
    return tg;
}

std::size_t TaskGraph::task_index(const std::string& id) const {
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
        if (tasks_[i].id == id)
            return i;
    }
    throw Error(Errc::unknown_message, "no task with id '" + id + "'");
}

} // namespace rtevo
