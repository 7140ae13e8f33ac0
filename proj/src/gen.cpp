#include "rtevo/gen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rtevo/io.hpp"
#include "rtevo/rng.hpp"

namespace rtevo {

void GenParams::check() const {
    if (n_sets < 0)
        throw Error(Errc::invalid_config, "n_sets must be >= 0");
    if (msgs_per_set < 0 || (msgs_per_set == 0 && total_msgs < 0))
        throw Error(Errc::invalid_config, "message counts must be >= 0");
    if (!(target_util > 0.0 && target_util < 1.0))
        throw Error(Errc::invalid_config, "target_util must be in (0,1)");
    if (t_min < 10 || t_max < t_min)
        throw Error(Errc::invalid_config, "need 10 <= t_min <= t_max");
    if (!(deadline_factor > 0.0 && deadline_factor <= 1.0))
        throw Error(Errc::invalid_config, "deadline_factor must be in (0,1]");
    if (!(jitter_factor >= 0.0 && jitter_factor < 1.0))
        throw Error(Errc::invalid_config, "jitter_factor must be in [0,1)");
}

int messages_in_set(const GenParams& params, int set_index) {
    if (params.msgs_per_set > 0)
        return params.msgs_per_set;
    // Balanced split of total_msgs over n_sets.
    const long long total = params.total_msgs;
    const long long n = params.n_sets;
    return static_cast<int>(total * (set_index + 1) / n - total * set_index / n);
}

double set_utilization(const MessageSet& set) {
    double u = 0.0;
    for (const Message& m : set.messages())
        u += static_cast<double>(m.c) / static_cast<double>(m.t);
    return u;
}

namespace {

// Unbiased uniform split of `total` utilization into n parts (UUniFast).
std::vector<double> simplex_split(Rng& rng, int n, double total) {
    std::vector<double> u(n);
    double remaining = total;
    for (int i = 0; i < n - 1; ++i) {
        double next = remaining * std::pow(rng.real01(), 1.0 / (n - 1 - i));
        u[i] = remaining - next;
        remaining = next;
    }
    u[n - 1] = remaining;
    return u;
}

std::string padded_id(int i, int width) {
    std::string num = std::to_string(i);
    while (static_cast<int>(num.size()) < width)
        num.insert(num.begin(), '0');
    return "m" + num;
}

} // namespace

MessageSet generate_message_set(const GenParams& params, int set_index) {
    params.check();
    const int n = messages_in_set(params, set_index);
    if (n <= 0)
        return MessageSet::validate({});

    Rng rng = Rng::stream(params.seed, static_cast<std::uint64_t>(set_index));
    const double log_min = std::log(static_cast<double>(params.t_min));
    const double log_max = std::log(static_cast<double>(params.t_max));
    const int id_width = static_cast<int>(std::to_string(n).size());

    for (int attempt = 0; attempt < 100; ++attempt) {
        std::vector<double> u = simplex_split(rng, n, params.target_util);
        std::vector<Message> msgs(n);
        bool feasible = true;
        double util = 0.0;
        for (int i = 0; i < n; ++i) {
            Message& m = msgs[i];
            m.id = padded_id(i + 1, id_width);
            double t_real = std::exp(rng.real(log_min, log_max));
            m.t = std::clamp<Ticks>(static_cast<Ticks>(std::llround(t_real)),
                                    params.t_min, params.t_max);
            m.c = std::max<Ticks>(1, std::llround(u[i] * static_cast<double>(m.t)));
            Ticks d_lo = static_cast<Ticks>(
                std::ceil(params.deadline_factor * static_cast<double>(m.t)));
            d_lo = std::clamp<Ticks>(d_lo, 1, m.t);
            m.d = rng.range(d_lo, m.t);
            Ticks j_hi = static_cast<Ticks>(
                std::floor(params.jitter_factor * static_cast<double>(m.t)));
            m.j = rng.range(0, std::max<Ticks>(j_hi, 0));
            if (m.c > m.d) {
                feasible = false;
                break;
            }
            util += static_cast<double>(m.c) / static_cast<double>(m.t);
        }
        if (!feasible || util > params.target_util + 0.05)
            continue;

        // Deadline-monotonic priorities, ties broken by id.
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (msgs[a].d != msgs[b].d)
                return msgs[a].d < msgs[b].d;
            return msgs[a].id < msgs[b].id;
        });
        for (int rank = 0; rank < n; ++rank)
            msgs[order[rank]].priority = rank + 1;
        return MessageSet::validate(std::move(msgs));
    }
    throw Error(Errc::infeasible_params,
                "could not satisfy C <= D and the utilization budget in 100 attempts "
                "(set " + std::to_string(set_index) + ")");
}

Corpus generate_corpus_in_memory(const GenParams& params) {
    params.check();
    Corpus corpus;
    corpus.sets.reserve(params.n_sets);
    for (int i = 0; i < params.n_sets; ++i)
        corpus.sets.push_back(generate_message_set(params, i));
    return corpus;
}

namespace {

std::string set_file_name(int index) {
    std::string num = std::to_string(index);
    while (num.size() < 3)
        num.insert(num.begin(), '0');
    return "set_" + num + ".csv";
}

} // namespace

CorpusManifest generate_corpus(const GenParams& params,
                               const std::filesystem::path& out_dir) {
    params.check();
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir))
        throw Error(Errc::io_error, "cannot create " + out_dir.string());

    CorpusManifest manifest;
    manifest.params = params;
    for (int i = 0; i < params.n_sets; ++i) {
        MessageSet set = generate_message_set(params, i);
        const std::string file = set_file_name(i);
        KvList kv{{"set_index", std::to_string(i)},
                  {"seed", std::to_string(params.seed)}};
        save_message_set_csv(out_dir / file, set,
                             provenance_header("gen-corpus", kv));
        manifest.sets.push_back(
            {file, static_cast<int>(set.size()), set_utilization(set)});
    }
    save_manifest(out_dir / "manifest.json", manifest,
                  provenance_header("gen-corpus", {}));
    return manifest;
}

} // namespace rtevo
