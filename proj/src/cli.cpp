#include "rtevo/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "rtevo/alloc.hpp"
#include "rtevo/analysis.hpp"
#include "rtevo/evolve.hpp"
#include "rtevo/io.hpp"
#include "rtevo/report.hpp"

namespace rtevo {

namespace {

struct RunConfig {
    GenParams gen;
    EvoConfig evo;
    FitnessConfig fc;
    AnalysisConfig an;
    CoevoConfig co;
    unsigned threads = 1;
};

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

const char* oracle_name(OracleKind k) {
    return k == OracleKind::exact ? "exact" : "sim-watermark";
}

// Flat key=value config; every key mirrors one field. Unknown keys are
// rejected so typos fail loudly.
void apply_kv(RunConfig& cfg, const std::map<std::string, std::string>& kv,
              const std::string& where) {
    auto to_i64 = [&](const std::string& k, const std::string& v) {
        try {
            return std::stoll(v);
        } catch (const std::exception&) {
            throw Error(Errc::io_error, where + ": bad integer for " + k);
        }
    };
    auto to_f64 = [&](const std::string& k, const std::string& v) {
        try {
            return std::stod(v);
        } catch (const std::exception&) {
            throw Error(Errc::io_error, where + ": bad number for " + k);
        }
    };
    for (const auto& [k, v] : kv) {
        if (k == "sets") cfg.gen.n_sets = static_cast<int>(to_i64(k, v));
        else if (k == "msgs") cfg.gen.msgs_per_set = static_cast<int>(to_i64(k, v));
        else if (k == "total_msgs") cfg.gen.total_msgs = static_cast<int>(to_i64(k, v));
        else if (k == "util") cfg.gen.target_util = to_f64(k, v);
        else if (k == "t_min") cfg.gen.t_min = to_i64(k, v);
        else if (k == "t_max") cfg.gen.t_max = to_i64(k, v);
        else if (k == "deadline_factor") cfg.gen.deadline_factor = to_f64(k, v);
        else if (k == "jitter_factor") cfg.gen.jitter_factor = to_f64(k, v);
        else if (k == "seed") {
            cfg.gen.seed = static_cast<std::uint64_t>(to_i64(k, v));
            cfg.evo.seed = cfg.gen.seed;
        }
        else if (k == "population") cfg.evo.population = static_cast<int>(to_i64(k, v));
        else if (k == "generations") cfg.evo.generations = static_cast<int>(to_i64(k, v));
        else if (k == "tournament") cfg.evo.tournament = static_cast<int>(to_i64(k, v));
        else if (k == "crossover_rate") cfg.evo.crossover_rate = to_f64(k, v);
        else if (k == "mutation_rate") cfg.evo.mutation_rate = to_f64(k, v);
        else if (k == "elitism") cfg.evo.elitism = static_cast<int>(to_i64(k, v));
        else if (k == "codon_length") cfg.evo.codon_length = static_cast<int>(to_i64(k, v));
        else if (k == "oracle") {
            if (v == "exact") cfg.fc.oracle = OracleKind::exact;
            else if (v == "sim-watermark") cfg.fc.oracle = OracleKind::sim_watermark;
            else throw Error(Errc::io_error, where + ": oracle must be exact|sim-watermark");
        }
        else if (k == "p_opt") cfg.fc.p_opt = to_i64(k, v);
        else if (k == "k_opt") cfg.fc.k_opt = to_i64(k, v);
        else if (k == "p_div") cfg.fc.p_div = to_i64(k, v);
        else if (k == "tau_bit") cfg.an.tau_bit = to_i64(k, v);
        else if (k == "iter_limit") cfg.an.iter_limit = static_cast<int>(to_i64(k, v));
        else if (k == "cap_factor") cfg.an.cap_factor = to_i64(k, v);
        else if (k == "rounds") cfg.co.rounds = static_cast<int>(to_i64(k, v));
        else if (k == "test_epochs") cfg.co.test_epochs = static_cast<int>(to_i64(k, v));
        else if (k == "scenario_epochs") cfg.co.scenario_epochs = static_cast<int>(to_i64(k, v));
        else if (k == "scenario_population") cfg.co.scenario_population = static_cast<int>(to_i64(k, v));
        else if (k == "top_n") cfg.co.top_n = static_cast<int>(to_i64(k, v));
        else if (k == "scenario_horizon") cfg.co.scenario_horizon = to_i64(k, v);
        else if (k == "threads") cfg.threads = static_cast<unsigned>(to_i64(k, v));
        else throw Error(Errc::io_error, where + ": unknown key '" + k + "'");
    }
}

// Full effective configuration, echoed into every output header.
KvList effective_kv(const RunConfig& cfg) {
    KvList kv;
    kv.emplace_back("sets", std::to_string(cfg.gen.n_sets));
    kv.emplace_back("msgs", std::to_string(cfg.gen.msgs_per_set));
    kv.emplace_back("total_msgs", std::to_string(cfg.gen.total_msgs));
    kv.emplace_back("util", fmt6(cfg.gen.target_util));
    kv.emplace_back("t_min", std::to_string(cfg.gen.t_min));
    kv.emplace_back("t_max", std::to_string(cfg.gen.t_max));
    kv.emplace_back("deadline_factor", fmt6(cfg.gen.deadline_factor));
    kv.emplace_back("jitter_factor", fmt6(cfg.gen.jitter_factor));
    kv.emplace_back("seed", std::to_string(cfg.evo.seed));
    kv.emplace_back("population", std::to_string(cfg.evo.population));
    kv.emplace_back("generations", std::to_string(cfg.evo.generations));
    kv.emplace_back("tournament", std::to_string(cfg.evo.tournament));
    kv.emplace_back("crossover_rate", fmt6(cfg.evo.crossover_rate));
    kv.emplace_back("mutation_rate", fmt6(cfg.evo.mutation_rate));
    kv.emplace_back("elitism", std::to_string(cfg.evo.elitism));
    kv.emplace_back("codon_length", std::to_string(cfg.evo.codon_length));
    kv.emplace_back("oracle", oracle_name(cfg.fc.oracle));
    kv.emplace_back("p_opt", std::to_string(cfg.fc.p_opt));
    kv.emplace_back("k_opt", std::to_string(cfg.fc.k_opt));
    kv.emplace_back("p_div", std::to_string(cfg.fc.p_div));
    kv.emplace_back("tau_bit", std::to_string(cfg.an.tau_bit));
    kv.emplace_back("iter_limit", std::to_string(cfg.an.iter_limit));
    kv.emplace_back("cap_factor", std::to_string(cfg.an.cap_factor));
    kv.emplace_back("rounds", std::to_string(cfg.co.rounds));
    kv.emplace_back("test_epochs", std::to_string(cfg.co.test_epochs));
    kv.emplace_back("scenario_epochs", std::to_string(cfg.co.scenario_epochs));
    kv.emplace_back("scenario_population", std::to_string(cfg.co.scenario_population));
    kv.emplace_back("top_n", std::to_string(cfg.co.top_n));
    kv.emplace_back("scenario_horizon", std::to_string(cfg.co.scenario_horizon));
    kv.emplace_back("threads", std::to_string(cfg.threads));
    return kv;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error(Errc::io_error, "cannot write " + path);
    return out;
}

void write_verdict_row(std::ostream& os, const std::string& id, TestKind test,
                       const RtVerdict& v) {
    os << id << ',' << test_kind_name(test) << ',' << rt_kind_name(v.kind)
       << ',';
    if (v.kind != RtKind::exceeded_cap)
        os << v.r;
    os << ',' << v.iterations << '\n';
}

void write_history_csv(const std::string& path, const RunHistory& hist,
                       const std::string& header) {
    std::ofstream out = open_out(path);
    out << header << "generation,best_fitness,mean_fitness,best_formula\n";
    for (const GenerationStats& g : hist.generations)
        out << g.generation << ',' << g.best_fitness << ','
            << fmt6(g.mean_fitness) << ',' << g.best_formula << '\n';
}

int cmd_gen_corpus(const RunConfig& cfg, const std::string& out_dir) {
    CorpusManifest m = generate_corpus(cfg.gen, out_dir);
    std::size_t total = 0;
    for (const auto& s : m.sets)
        total += static_cast<std::size_t>(s.messages);
    std::cout << "wrote " << m.sets.size() << " sets (" << total
              << " messages) to " << out_dir << "\n";
    return 0;
}

int cmd_analyze(const RunConfig& cfg, const std::string& in,
                const std::string& test, const std::string& out_path) {
    MessageSet set = load_message_set_csv(in);
    for (const std::string& id : set.flagged())
        std::cerr << "note: message '" << id << "' violates C <= D <= T\n";

    SetReport report = analyze_set(set, cfg.an);
    std::ostringstream body;
    body << "id,test,verdict,r,iterations\n";
    for (const auto& row : report.rows) {
        if (test == "all" || test == "exact")
            write_verdict_row(body, row.id, TestKind::exact, row.exact);
        if (test == "all" || test == "s1")
            write_verdict_row(body, row.id, TestKind::s1, row.s1);
        if (test == "all" || test == "cf-d")
            write_verdict_row(body, row.id, TestKind::closed_d, row.cf_d);
        if (test == "all" || test == "cf-s")
            write_verdict_row(body, row.id, TestKind::closed_simple, row.cf_s);
    }
    const std::string header = provenance_header("analyze", effective_kv(cfg));
    if (out_path.empty() || out_path == "-") {
        std::cout << header << body.str();
    } else {
        std::ofstream out = open_out(out_path);
        out << header << body.str();
    }
    return 0;
}

int cmd_simulate(const RunConfig& cfg, const std::string& in,
                 const std::string& scenario_arg, Ticks horizon,
                 const std::string& trace_path, const std::string& out_path) {
    MessageSet set = load_message_set_csv(in);
    Scenario scenario;
    if (scenario_arg == "critical") {
        Ticks h = horizon > 0 ? horizon : default_horizon(set).horizon;
        scenario = critical_instant_scenario(set, h);
    } else {
        scenario = load_scenario_csv(scenario_arg, set, 1);
        Ticks max_offset = 0;
        for (const auto& e : scenario.entries)
            max_offset = std::max(max_offset, e.offset);
        scenario.horizon =
            horizon > 0 ? horizon : default_horizon(set, max_offset).horizon;
    }

    SimOptions opts;
    opts.record_trace = !trace_path.empty();
    SimResult result = simulate(set, scenario, opts);

    std::ostringstream body;
    body << "# horizon=" << scenario.horizon << "\n";
    if (result.first_miss) {
        body << "# first_miss=" << set.at(result.first_miss->msg_index).id
             << ":" << result.first_miss->instance << "@"
             << result.first_miss->nominal << "\n";
    } else {
        body << "# first_miss=none\n";
    }
    body << "id,watermark,instances\n";
    for (std::size_t i = 0; i < set.size(); ++i)
        body << set.at(i).id << ',' << result.per_message[i].watermark << ','
             << result.per_message[i].instances << '\n';

    const std::string header = provenance_header("simulate", effective_kv(cfg));
    if (out_path.empty() || out_path == "-") {
        std::cout << header << body.str();
    } else {
        std::ofstream out = open_out(out_path);
        out << header << body.str();
    }
    if (!trace_path.empty()) {
        std::ofstream out = open_out(trace_path);
        out << header << "id,instance,nominal,start,completion\n";
        for (const TraceEvent& e : result.trace)
            out << set.at(e.msg_index).id << ',' << e.instance << ','
                << e.nominal << ',' << e.start << ',' << e.completion << '\n';
    }
    return 0;
}

int cmd_evolve_test(const RunConfig& cfg, const std::string& corpus_dir,
                    const std::string& out_path, const std::string& log_path) {
    Corpus corpus = load_corpus(corpus_dir);
    RunHistory hist =
        evolve_tests(corpus, cfg.evo, cfg.fc, cfg.an, Grammar::standard(),
                     cfg.threads);
    const std::string header =
        provenance_header("evolve-test", effective_kv(cfg));
    if (!log_path.empty())
        write_history_csv(log_path, hist, header);
    if (!out_path.empty()) {
        save_formula_file(
            out_path, {hist.best},
            {"rtevo " RTEVO_VERSION " evolve-test",
             "seed=" + std::to_string(cfg.evo.seed),
             "generations=" + std::to_string(cfg.evo.generations),
             "fitness=" + std::to_string(hist.best_fitness)});
    }
    std::cout << "best fitness " << hist.best_fitness << ": "
              << render_formula(hist.best) << "\n";
    return 0;
}

int cmd_coevolve(const RunConfig& cfg, const std::string& out_path,
                 const std::string& log_path, const std::string& scenario_log,
                 const std::string& hardest_path) {
    Corpus corpus = generate_corpus_in_memory(cfg.gen);
    CoevoResult res =
        coevolve(corpus, cfg.evo, cfg.fc, cfg.co, cfg.an, cfg.threads);
    const std::string header = provenance_header("coevolve", effective_kv(cfg));
    if (!log_path.empty())
        write_history_csv(log_path, res.test_history, header);
    if (!scenario_log.empty()) {
        std::ofstream out = open_out(scenario_log);
        out << header << "generation,best_refutations,mean_refutations\n";
        for (const GenerationStats& g : res.scenario_history)
            out << g.generation << ',' << g.best_fitness << ','
                << fmt6(g.mean_fitness) << '\n';
    }
    if (!out_path.empty()) {
        save_formula_file(out_path, res.best_tests,
                          {"rtevo " RTEVO_VERSION " coevolve",
                           "seed=" + std::to_string(cfg.evo.seed),
                           "rounds=" + std::to_string(cfg.co.rounds)});
    }
    if (!hardest_path.empty() && !res.hardest.empty()) {
        const ScenarioGene& g = res.hardest.front();
        std::string h = header;
        h += "# set_index=" + std::to_string(g.set_index) + "\n";
        h += "# horizon=" + std::to_string(g.scenario.horizon) + "\n";
        save_scenario_csv(hardest_path, corpus.sets[g.set_index], g.scenario,
                          h);
    }
    std::cout << "coevolved " << res.best_tests.size() << " tests over "
              << cfg.co.rounds << " rounds\n";
    return 0;
}

int cmd_allocate(const RunConfig& cfg, const std::string& tasks_path,
                 int nodes, const std::string& fitness_kind,
                 const std::string& out_path, const std::string& log_path) {
    TaskGraph tg = load_task_graph_json(tasks_path);
    Platform platform{nodes};
    AllocFitnessKind kind = fitness_kind == "breakdown"
                                ? AllocFitnessKind::breakdown
                                : AllocFitnessKind::count;
    AllocResult res =
        evolve_allocation(tg, platform, cfg.evo, kind, cfg.an, cfg.threads);
    const std::string header = provenance_header("allocate", effective_kv(cfg));

    auto fitness_str = [](const AllocFitness& f) {
        if (f.kind == AllocFitnessKind::count)
            return std::to_string(f.count) + "/" + std::to_string(f.total);
        return f.breakdown_infinite() ? std::string("inf")
                                      : fmt6(f.breakdown());
    };
    if (!out_path.empty()) {
        std::ofstream out = open_out(out_path);
        out << header << "# fitness=" << fitness_str(res.fitness) << "\n"
            << "task_id,node\n";
        for (std::size_t t = 0; t < tg.tasks().size(); ++t)
            out << tg.tasks()[t].id << ',' << res.best.genes[t] << '\n';
    }
    if (!log_path.empty()) {
        std::ofstream out = open_out(log_path);
        out << header << "generation,best_fitness,mean_count\n";
        for (const AllocGenerationStats& g : res.history)
            out << g.generation << ',' << fitness_str(g.best) << ','
                << fmt6(g.mean_count) << '\n';
    }
    std::cout << "best allocation fitness " << fitness_str(res.fitness) << "\n";
    return 0;
}

// Pulls the evolved best formula out of an evolve-test history CSV.
std::optional<Formula> formula_from_history(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::io_error, "cannot open " + path);
    std::string line, last;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        if (!header_seen) {
            header_seen = true; // column header
            continue;
        }
        last = line;
    }
    if (last.empty())
        return std::nullopt;
    int commas = 0;
    std::size_t pos = 0;
    for (; pos < last.size() && commas < 3; ++pos) {
        if (last[pos] == ',')
            ++commas;
    }
    if (commas < 3)
        throw Error(Errc::io_error, path + ": malformed history row");
    std::string text = last.substr(pos);
    if (text == "(incomplete)")
        return std::nullopt;
    return parse_formula(text);
}

int cmd_report(const RunConfig& cfg, const std::string& baselines_dir,
               const std::string& history_path, const std::string& best_path,
               const std::string& svg_path, std::string csv_path) {
    Corpus corpus = load_corpus(baselines_dir);
    std::vector<std::pair<std::string, Formula>> formulas = {
        {"eq1", builtin(1)},
        {"eq2", builtin(2)},
        {"eq3", builtin(3)},
        {"eq4", builtin(4)},
    };
    if (!best_path.empty()) {
        std::vector<Formula> best = load_formula_file(best_path);
        if (best.empty())
            throw Error(Errc::io_error, best_path + " holds no formula");
        formulas.emplace_back("evolved", best.front());
    } else if (!history_path.empty()) {
        if (auto f = formula_from_history(history_path))
            formulas.emplace_back("evolved", *f);
        else
            std::cerr << "note: history has no mapped best formula\n";
    }

    std::vector<ReportRow> rows = build_report(corpus, formulas, cfg.fc, cfg.an);
    const std::string header = provenance_header("report", effective_kv(cfg));

    if (csv_path.empty() && !svg_path.empty()) {
        csv_path = svg_path;
        auto dot = csv_path.rfind('.');
        if (dot != std::string::npos)
            csv_path.resize(dot);
        csv_path += ".csv";
    }
    std::ostringstream body;
    body << "name,formula,fitness,normalized,optimistic,divergent\n";
    for (const ReportRow& r : rows)
        body << r.name << ',' << r.formula << ',' << r.fitness << ','
             << fmt6(r.normalized) << ',' << r.optimistic << ',' << r.divergent
             << '\n';
    if (!csv_path.empty()) {
        std::ofstream out = open_out(csv_path);
        out << header << body.str();
    }
    if (!svg_path.empty()) {
        std::ofstream out = open_out(svg_path);
        out << "<!--\n" << header << "-->\n" << fig4_svg(rows);
    }
    for (const ReportRow& r : rows)
        std::cout << r.name << ": fitness=" << r.fitness
                  << " normalized=" << fmt6(r.normalized)
                  << " optimistic=" << r.optimistic
                  << " divergent=" << r.divergent << "\n";
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    RunConfig cfg;

    try {
        // --config FILE loads defaults first; explicit flags then override.
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config" && i + 1 < args.size()) {
                apply_kv(cfg, load_kv_config(args[i + 1]), args[i + 1]);
            } else if (args[i].rfind("--config=", 0) == 0) {
                const std::string path = args[i].substr(9);
                apply_kv(cfg, load_kv_config(path), path);
            }
        }

        CLI::App app{"response-time schedulability toolkit"};
        app.set_version_flag("--version", RTEVO_VERSION);
        app.require_subcommand(1);
        std::string config_path; // consumed above; declared so CLI11 accepts it
        app.add_option("--config", config_path, "key=value config file");

        std::uint64_t seed = cfg.evo.seed;
        auto* seed_opt = app.add_option("--seed", seed, "master seed");
        app.add_option("--threads", cfg.threads, "worker threads");
        std::string oracle_str = oracle_name(cfg.fc.oracle);

        auto add_analysis_flags = [&](CLI::App* sub) {
            sub->add_option("--tau-bit", cfg.an.tau_bit, "arbitration granularity");
            sub->add_option("--iter-limit", cfg.an.iter_limit, "fixed-point iteration limit");
            sub->add_option("--cap-factor", cfg.an.cap_factor, "divergence cap factor");
        };
        auto add_fitness_flags = [&](CLI::App* sub) {
            sub->add_option("--oracle", oracle_str, "exact|sim-watermark")
                ->check(CLI::IsMember({"exact", "sim-watermark"}));
            sub->add_option("--p-opt", cfg.fc.p_opt, "optimism slope");
            sub->add_option("--k-opt", cfg.fc.k_opt, "optimism offset");
            sub->add_option("--p-div", cfg.fc.p_div, "divergence penalty");
        };
        auto add_evo_flags = [&](CLI::App* sub) {
            sub->add_option("--population", cfg.evo.population, "population size");
            sub->add_option("--generations", cfg.evo.generations, "generation count");
            sub->add_option("--tournament", cfg.evo.tournament, "tournament size");
            sub->add_option("--crossover-rate", cfg.evo.crossover_rate, "crossover rate");
            sub->add_option("--mutation-rate", cfg.evo.mutation_rate, "mutation rate");
            sub->add_option("--elitism", cfg.evo.elitism, "elite count");
            sub->add_option("--codon-length", cfg.evo.codon_length, "codon vector length");
        };
        auto add_gen_flags = [&](CLI::App* sub) {
            sub->add_option("--sets", cfg.gen.n_sets, "number of message sets");
            sub->add_option("--msgs", cfg.gen.msgs_per_set,
                            "messages per set (0 = balance total)");
            sub->add_option("--total", cfg.gen.total_msgs, "total messages");
            sub->add_option("--util", cfg.gen.target_util, "target utilization");
            sub->add_option("--tmin", cfg.gen.t_min, "minimum period");
            sub->add_option("--tmax", cfg.gen.t_max, "maximum period");
            sub->add_option("--deadline-factor", cfg.gen.deadline_factor,
                            "D lower bound as fraction of T");
            sub->add_option("--jitter-factor", cfg.gen.jitter_factor,
                            "J upper bound as fraction of T");
        };

        // gen-corpus
        auto* gen = app.add_subcommand("gen-corpus", "generate a message-set corpus");
        std::string gen_out;
        add_gen_flags(gen);
        gen->add_option("--out", gen_out, "output directory")->required();

        // analyze
        auto* analyze = app.add_subcommand("analyze", "run schedulability tests");
        std::string an_in, an_test = "all", an_out;
        analyze->add_option("--in", an_in, "message-set CSV")->required();
        analyze->add_option("--test", an_test, "s1|cf-d|cf-s|exact|all")
            ->check(CLI::IsMember({"s1", "cf-d", "cf-s", "exact", "all"}));
        analyze->add_option("--out", an_out, "report CSV (default stdout)");
        add_analysis_flags(analyze);

        // simulate
        auto* sim = app.add_subcommand("simulate", "run the bus simulator");
        std::string sim_in, sim_scenario = "critical", sim_trace, sim_out;
        Ticks sim_horizon = 0;
        sim->add_option("--in", sim_in, "message-set CSV")->required();
        sim->add_option("--scenario", sim_scenario, "critical|FILE");
        sim->add_option("--horizon", sim_horizon, "simulation horizon (0 = auto)");
        sim->add_option("--trace", sim_trace, "event trace CSV");
        sim->add_option("--out", sim_out, "watermark CSV (default stdout)");

        // evolve-test
        auto* ev = app.add_subcommand("evolve-test", "evolve response-time tests");
        std::string ev_corpus, ev_out, ev_log;
        ev->add_option("--corpus", ev_corpus, "corpus directory")->required();
        ev->add_option("--out", ev_out, "best formula file");
        ev->add_option("--log", ev_log, "history CSV");
        add_evo_flags(ev);
        add_fitness_flags(ev);
        add_analysis_flags(ev);

        // coevolve
        auto* co = app.add_subcommand("coevolve",
                                      "co-evolve tests and refuting scenarios");
        std::string co_params, co_out, co_log, co_scen_log, co_hardest;
        co->add_option("--corpus-params", co_params, "key=value corpus params")
            ->required();
        co->add_option("--rounds", cfg.co.rounds, "co-evolution rounds");
        co->add_option("--test-epochs", cfg.co.test_epochs, "test generations per round");
        co->add_option("--scenario-epochs", cfg.co.scenario_epochs,
                       "scenario generations per round");
        co->add_option("--scenario-population", cfg.co.scenario_population,
                       "scenario population");
        co->add_option("--top-n", cfg.co.top_n, "tests attacked by scenarios");
        co->add_option("--scenario-horizon", cfg.co.scenario_horizon,
                       "scenario simulation horizon cap");
        co->add_option("--out", co_out, "best tests file");
        co->add_option("--log", co_log, "test history CSV");
        co->add_option("--scenario-log", co_scen_log, "scenario history CSV");
        co->add_option("--hardest", co_hardest, "hardest scenario CSV");
        add_evo_flags(co);
        add_fitness_flags(co);
        add_analysis_flags(co);

        // allocate
        auto* alloc = app.add_subcommand("allocate", "evolve a task allocation");
        std::string al_tasks, al_fitness = "count", al_out, al_log;
        int al_nodes = 2;
        alloc->add_option("--tasks", al_tasks, "task graph JSON")->required();
        alloc->add_option("--nodes", al_nodes, "processor count")->required();
        alloc->add_option("--fitness", al_fitness, "count|breakdown")
            ->check(CLI::IsMember({"count", "breakdown"}));
        alloc->add_option("--out", al_out, "allocation CSV");
        alloc->add_option("--log", al_log, "history CSV");
        add_evo_flags(alloc);
        add_analysis_flags(alloc);

        // report
        auto* rep = app.add_subcommand("report", "normalized-fitness report");
        std::string rp_baselines, rp_history, rp_best, rp_svg, rp_csv;
        rep->add_option("--baselines", rp_baselines, "corpus directory")
            ->required();
        rep->add_option("--history", rp_history, "evolve-test history CSV");
        rep->add_option("--best", rp_best, "best formula file");
        rep->add_option("--svg", rp_svg, "bar chart SVG");
        rep->add_option("--csv", rp_csv, "report CSV");
        add_fitness_flags(rep);
        add_analysis_flags(rep);

        // Let global flags (--seed, --threads, --config) appear after the
        // subcommand name too.
        for (CLI::App* sub : app.get_subcommands(
                 [](const CLI::App*) { return true; }))
            sub->fallthrough();

        std::vector<std::string> rev(args.rbegin(), args.rend());
        try {
            app.parse(rev);
        } catch (const CLI::ParseError& e) {
            int rc = app.exit(e);
            return rc == 0 ? 0 : 1;
        }

        const bool seed_given = seed_opt->count() > 0;
        if (seed_given) {
            cfg.gen.seed = seed;
            cfg.evo.seed = seed;
        }
        cfg.fc.oracle = oracle_str == "sim-watermark" ? OracleKind::sim_watermark
                                                      : OracleKind::exact;

        if (gen->parsed())
            return cmd_gen_corpus(cfg, gen_out);
        if (analyze->parsed())
            return cmd_analyze(cfg, an_in, an_test, an_out);
        if (sim->parsed())
            return cmd_simulate(cfg, sim_in, sim_scenario, sim_horizon,
                                sim_trace, sim_out);
        if (ev->parsed())
            return cmd_evolve_test(cfg, ev_corpus, ev_out, ev_log);
        if (co->parsed()) {
            apply_kv(cfg, load_kv_config(co_params), co_params);
            if (seed_given) {
                cfg.gen.seed = seed;
                cfg.evo.seed = seed;
            }
            return cmd_coevolve(cfg, co_out, co_log, co_scen_log, co_hardest);
        }
        if (alloc->parsed())
            return cmd_allocate(cfg, al_tasks, al_nodes, al_fitness, al_out,
                                al_log);
        if (rep->parsed())
            return cmd_report(cfg, rp_baselines, rp_history, rp_best, rp_svg,
                              rp_csv);
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == Errc::io_error ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace rtevo
