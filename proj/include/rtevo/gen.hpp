#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rtevo/model.hpp"

namespace rtevo {

// Corpus generation parameters. Defaults target the experimental scale of
// 135 sets totalling 2600 messages. When msgs_per_set is 0, total_msgs is
// split as evenly as possible across the sets.
struct GenParams {
    int n_sets = 135;
    int msgs_per_set = 0;
    int total_msgs = 2600;
    double target_util = 0.5;   // fraction of bus capacity, in (0,1)
    Ticks t_min = 1000;         // period range, log-uniform
    Ticks t_max = 5000;
    double deadline_factor = 0.7; // D uniform in [factor*T, T]
    double jitter_factor = 0.1;   // J uniform in [0, factor*T]
    std::uint64_t seed = 1;

    void check() const;
};

int messages_in_set(const GenParams& params, int set_index);

// Seeded, deterministic: (params, set_index) fully determines the output.
// Utilizations come from an unbiased uniform simplex split of target_util;
// C_i = max(1, round(u_i * T_i)); priorities are deadline-monotonic with id
// tie-break. Sets violating C <= D or the utilization budget are redrawn
// (up to 100 attempts) rather than clamped.
MessageSet generate_message_set(const GenParams& params, int set_index);

struct Corpus {
    std::vector<MessageSet> sets;

    std::size_t total_messages() const {
        std::size_t n = 0;
        for (const MessageSet& s : sets)
            n += s.size();
        return n;
    }
};

Corpus generate_corpus_in_memory(const GenParams& params);

double set_utilization(const MessageSet& set);

struct CorpusManifest {
    GenParams params;
    struct SetEntry {
        std::string file;
        int messages = 0;
        double utilization = 0.0;
    };
    std::vector<SetEntry> sets;
};

// Writes one CSV per set plus manifest.json under out_dir; re-running with
// identical params reproduces identical bytes.
CorpusManifest generate_corpus(const GenParams& params,
                               const std::filesystem::path& out_dir);

} // namespace rtevo
