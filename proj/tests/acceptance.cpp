// Acceptance suite: runs every criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion. Exit code = number of failed criteria.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "oracles.hpp"
#include "rtevo/alloc.hpp"
#include "rtevo/analysis.hpp"
#include "rtevo/cli.hpp"
#include "rtevo/evolve.hpp"
#include "rtevo/gen.hpp"
#include "rtevo/io.hpp"
#include "rtevo/report.hpp"
#include "rtevo/rng.hpp"
#include "rtevo/sim.hpp"

using namespace rtevo;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int id;
    std::string name;
    bool pass;
    std::string detail;
    double seconds;
};

std::vector<Outcome> g_results;

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void record(int id, const std::string& name, bool pass,
            const std::string& detail, double seconds) {
    g_results.push_back({id, name, pass, detail, seconds});
}

// The pinned experimental corpus for criteria 2-4: 135 sets, 2600 messages,
// utilization 0.6, periods log-uniform in [1000, 5000], seed 42.
GenParams corpus_params() {
    GenParams p;
    p.n_sets = 135;
    p.msgs_per_set = 0;
    p.total_msgs = 2600;
    p.target_util = 0.6;
    p.t_min = 1000;
    p.t_max = 5000;
    p.deadline_factor = 0.7;
    p.jitter_factor = 0.1;
    p.seed = 42;
    return p;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

// --- Criterion 1: worked micro-set, exact match, < 1 s -----------------------

void criterion1() {
    Timer timer;
    bool ok = true;
    std::ostringstream detail;

    MessageSet set = testutil::micro_set();
    AnalysisConfig cfg;
    SetReport rep = analyze_set(set, cfg);

    auto expect = [&](Ticks got, Ticks want, const char* what) {
        if (got != want) {
            ok = false;
            detail << what << " got " << got << " want " << want << "; ";
        }
    };
    expect(rep.rows[0].exact.r, 3, "exact(m1)");
    expect(rep.rows[1].exact.r, 3, "exact(m2)");
    expect(rep.rows[0].s1.r, 3, "s1(m1)");
    expect(rep.rows[1].s1.r, 5, "s1(m2)");
    expect(rep.rows[0].cf_d.r, 3, "cf_d(m1)");
    expect(rep.rows[1].cf_d.r, 7, "cf_d(m2)");
    expect(rep.rows[0].cf_s.r, 3, "cf_s(m1)");
    expect(rep.rows[1].cf_s.r, 7, "cf_s(m2)");

    // cross-check against the independently scripted oracles
    auto plain = testutil::to_oracle(set);
    ok = ok && oracle::eq1(plain, 1) == 5 && oracle::eq2(plain, 1) == 7 &&
         oracle::eq3(plain, 1) == 7 && oracle::exact(plain, 1) == 3 &&
         oracle::exact(plain, 0) == 3;

    double s = timer.seconds();
    if (s >= 1.0)
        ok = false;
    record(1, "worked micro-set", ok,
           detail.str() + "runtime " + fmt(s) + "s (< 1s)", s);
}

// --- Criterion 2: pessimism chain on the pinned corpus, < 30 s ---------------

void criterion2(const Corpus& corpus) {
    Timer timer;
    AnalysisConfig cfg;
    long long checked = 0, sim_checked = 0, violations = 0;
    std::ostringstream detail;

    for (const MessageSet& set : corpus.sets) {
        HorizonInfo h = default_horizon(set);
        SimResult sim = simulate(set, critical_instant_scenario(set, h.horizon));
        for (std::size_t i = 0; i < set.size(); ++i) {
            RtVerdict ex = rta_exact(set, i, cfg);
            RtVerdict s1 = rta_s1(set, i, cfg);
            RtVerdict cd = rta_closed_d(set, i);
            RtVerdict cs = rta_closed_simple(set, i);
            if (!(ex.converged() && s1.converged() && cd.converged() &&
                  cs.converged()))
                continue;
            ++checked;
            if (cd.r > cs.r)
                ++violations;
            // exact <= s1 <= cf_d is the sufficient-test chain, valid on the
            // region where S1's substitution assumption holds (r_s1 <= D).
            if (s1.r <= set.at(i).d && (ex.r > s1.r || s1.r > cd.r))
                ++violations;
            if (sim.per_message[i].instances > 0) {
                ++sim_checked;
                if (sim.per_message[i].watermark > ex.r)
                    ++violations;
            }
        }
    }
    double s = timer.seconds();
    bool ok = violations == 0 && checked >= 2000 && sim_checked >= 2000 &&
              s < 30.0;
    detail << checked << " messages, " << sim_checked << " sim watermarks, "
           << violations << " violations, runtime " << fmt(s) << "s (< 30s)";
    record(2, "pessimism chain", ok, detail.str(), s);
}

// --- Criterion 3: oracle equivalence of builtins 1-3 -------------------------

void criterion3(const Corpus& corpus) {
    Timer timer;
    AnalysisConfig cfg;
    long long total = 0, mismatches = 0;
    for (const MessageSet& set : corpus.sets) {
        for (std::size_t i = 0; i < set.size(); ++i) {
            RtVerdict hand[3] = {rta_s1(set, i, cfg), rta_closed_d(set, i),
                                 rta_closed_simple(set, i)};
            for (int k = 0; k < 3; ++k) {
                ++total;
                EvalOutcome e = eval_formula(builtin(k + 1), set, i, cfg);
                const bool same = hand[k].converged()
                                      ? (e.is_value && e.value == hand[k].r)
                                      : !e.is_value;
                if (!same)
                    ++mismatches;
            }
        }
    }
    double s = timer.seconds();
    bool ok = mismatches == 0 && total >= 3 * 2000;
    std::ostringstream detail;
    detail << total << " comparisons, " << mismatches << " mismatches";
    record(3, "oracle equivalence eval(builtin k) == hand-coded k", ok,
           detail.str(), s);
}

// --- Criterion 4: Fig. 4 qualitative reproduction ----------------------------

void criterion4(const Corpus& corpus) {
    Timer timer;
    FitnessConfig fc;
    AnalysisConfig cfg;
    std::vector<std::pair<std::string, Formula>> formulas = {
        {"eq1", builtin(1)},
        {"eq2", builtin(2)},
        {"eq3", builtin(3)},
        {"eq4", builtin(4)},
    };
    std::vector<ReportRow> rows = build_report(corpus, formulas, fc, cfg);
    bool ok = rows[0].fitness < rows[1].fitness &&
              rows[1].fitness <= rows[2].fitness;
    std::ostringstream detail;
    detail << "F1=" << rows[0].fitness << " < F2=" << rows[1].fitness
           << " <= F3=" << rows[2].fitness;
    // builtin(4)'s accuracy depends on the corpus shape, so it is
    // evaluated and reported, not asserted.
    std::printf("  [report] eq4 normalized=%.3f optimistic=%zu of 2600 "
                "(reported, not asserted)\n",
                rows[3].normalized, rows[3].optimistic);
    record(4, "Fig.4 qualitative ordering", ok, detail.str(), timer.seconds());
}

// --- Criterion 5: evolution efficacy, 5 seeds --------------------------------

void criterion5() {
    Timer timer;
    GenParams p;
    p.n_sets = 20;
    p.msgs_per_set = 15;
    p.target_util = 0.5;
    p.seed = 1100;
    Corpus corpus = generate_corpus_in_memory(p);

    FitnessConfig fc;
    AnalysisConfig cfg;
    PreparedCorpus prep = PreparedCorpus::prepare(corpus);
    OracleTable oracle = OracleTable::compute(corpus, fc.oracle, cfg);
    const std::int64_t f3 = score_formula(builtin(3), prep, oracle, fc, cfg).fitness;

    int successes = 0;
    bool monotone = true, in_time = true;
    std::ostringstream detail;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Timer run_timer;
        EvoConfig evo; // defaults: population 200, generations 100
        evo.seed = seed;
        RunHistory hist = evolve_tests(corpus, evo, fc, cfg);
        double rs = run_timer.seconds();
        if (rs >= 600.0)
            in_time = false;
        for (std::size_t g = 1; g < hist.generations.size(); ++g) {
            if (hist.generations[g].best_fitness >
                hist.generations[g - 1].best_fitness)
                monotone = false;
        }
        FormulaScore best = score_formula(hist.best, prep, oracle, fc, cfg);
        bool good = best.optimistic == 0 && best.fitness <= f3;
        if (good)
            ++successes;
        detail << "seed" << seed << "(F=" << best.fitness
               << ",opt=" << best.optimistic << "," << fmt(rs) << "s) ";
    }
    bool ok = successes >= 1 && monotone && in_time;
    detail << "| " << successes << "/5 non-optimistic and <= F(eq3)=" << f3
           << (monotone ? ", best fitness monotone" : ", MONOTONICITY BROKEN");
    record(5, "evolution efficacy", ok, detail.str(), timer.seconds());
}

// --- Criterion 6: byte-identical reruns, serial vs parallel ------------------

std::string payload_of(const fs::path& p) {
    std::ifstream in(p);
    std::string line, out;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#')
            continue;
        out += line;
        out += '\n';
    }
    return out;
}

std::string file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void criterion6() {
    Timer timer;
    bool ok = true;
    std::ostringstream detail;
    fs::path dir = fs::temp_directory_path() / "rtevo_acceptance_c6";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto at = [&](const std::string& leaf) { return (dir / leaf).string(); };

    auto run = [&](std::initializer_list<std::string> args, const char* what) {
        if (run_cli(std::vector<std::string>(args)) != 0) {
            ok = false;
            detail << what << " failed; ";
        }
    };
    auto same_payload = [&](const std::string& a, const std::string& b,
                            const char* what) {
        if (payload_of(a) != payload_of(b)) {
            ok = false;
            detail << what << " differs; ";
        }
    };

    run({"gen-corpus", "--sets", "6", "--msgs", "10", "--util", "0.5", "--seed",
         "17", "--out", at("corpus1")}, "gen-corpus#1");
    run({"gen-corpus", "--sets", "6", "--msgs", "10", "--util", "0.5", "--seed",
         "17", "--out", at("corpus2")}, "gen-corpus#2");
    if (file_bytes(dir / "corpus1/set_000.csv") !=
            file_bytes(dir / "corpus2/set_000.csv") ||
        file_bytes(dir / "corpus1/manifest.json") !=
            file_bytes(dir / "corpus2/manifest.json")) {
        ok = false;
        detail << "gen-corpus bytes differ; ";
    }

    run({"analyze", "--in", at("corpus1/set_000.csv"), "--out", at("an1.csv")},
        "analyze#1");
    run({"analyze", "--in", at("corpus1/set_000.csv"), "--out", at("an2.csv")},
        "analyze#2");
    same_payload(at("an1.csv"), at("an2.csv"), "analyze");

    run({"simulate", "--in", at("corpus1/set_000.csv"), "--out", at("sim1.csv"),
         "--horizon", "50000"}, "simulate#1");
    run({"simulate", "--in", at("corpus1/set_000.csv"), "--out", at("sim2.csv"),
         "--horizon", "50000"}, "simulate#2");
    same_payload(at("sim1.csv"), at("sim2.csv"), "simulate");

    auto evolve = [&](const char* tag, const char* threads) {
        run({"evolve-test", "--corpus", at("corpus1"), "--population", "30",
             "--generations", "8", "--seed", "5", "--threads", threads, "--out",
             at(std::string(tag) + ".sexp"), "--log", at(std::string(tag) + ".csv")},
            tag);
    };
    evolve("ev1", "1");
    evolve("ev2", "1");
    evolve("ev4", "4");
    same_payload(at("ev1.csv"), at("ev2.csv"), "evolve-test rerun");
    same_payload(at("ev1.csv"), at("ev4.csv"), "evolve-test serial-vs-parallel");
    if (file_bytes(dir / "ev1.sexp") != file_bytes(dir / "ev4.sexp")) {
        ok = false;
        detail << "best formula differs across thread counts; ";
    }

    {
        std::ofstream graph(dir / "graph.json");
        graph << R"({"tasks":[
            {"id":"t1","wcet":20,"t":100,"d":100,"priority":1},
            {"id":"t2","wcet":30,"t":120,"d":120,"priority":2},
            {"id":"t3","wcet":25,"t":150,"d":150,"priority":3}],
            "edges":[{"src":"t1","dst":"t3",
                      "frame":{"id":"f1","priority":1,"c":8,"t":100,"d":100,"j":0}}]})";
    }
    run({"allocate", "--tasks", at("graph.json"), "--nodes", "2", "--fitness",
         "count", "--population", "16", "--generations", "6", "--seed", "3",
         "--out", at("al1.csv"), "--log", at("alh1.csv")}, "allocate#1");
    run({"allocate", "--tasks", at("graph.json"), "--nodes", "2", "--fitness",
         "count", "--population", "16", "--generations", "6", "--seed", "3",
         "--threads", "4", "--out", at("al2.csv"), "--log", at("alh2.csv")},
        "allocate#2");
    same_payload(at("al1.csv"), at("al2.csv"), "allocate");
    same_payload(at("alh1.csv"), at("alh2.csv"), "allocate history");

    {
        std::ofstream params(dir / "coparams.cfg");
        params << "sets=3\nmsgs=8\nutil=0.9\nseed=23\n";
    }
    auto coevolve_run = [&](const char* tag, const char* threads) {
        run({"coevolve", "--corpus-params", at("coparams.cfg"), "--rounds", "1",
             "--test-epochs", "2", "--scenario-epochs", "2", "--population",
             "16", "--generations", "2", "--scenario-population", "8",
             "--threads", threads, "--out", at(std::string(tag) + ".sexp"),
             "--log", at(std::string(tag) + ".csv")}, tag);
    };
    coevolve_run("co1", "1");
    coevolve_run("co2", "4");
    same_payload(at("co1.csv"), at("co2.csv"), "coevolve");
    if (file_bytes(dir / "co1.sexp") != file_bytes(dir / "co2.sexp")) {
        ok = false;
        detail << "coevolve tests differ; ";
    }

    run({"report", "--baselines", at("corpus1"), "--history", at("ev1.csv"),
         "--svg", at("fig1.svg"), "--csv", at("fig1.csv")}, "report#1");
    run({"report", "--baselines", at("corpus1"), "--history", at("ev1.csv"),
         "--svg", at("fig2.svg"), "--csv", at("fig2.csv")}, "report#2");
    same_payload(at("fig1.csv"), at("fig2.csv"), "report");
    if (file_bytes(dir / "fig1.svg") != file_bytes(dir / "fig2.svg")) {
        ok = false;
        detail << "svg differs; ";
    }

    fs::remove_all(dir);
    if (ok)
        detail << "all subcommand payloads byte-identical across reruns and "
                  "thread counts";
    record(6, "determinism", ok, detail.str(), timer.seconds());
}

// --- Criterion 7: simulation refutation of an optimistic formula -------------

void criterion7() {
    Timer timer;
    AnalysisConfig cfg;
    const Formula optimistic = parse_formula("(rt Ci (isum Jk 0))");
    const std::vector<Formula> cands = {optimistic};

    int refuted = 0;
    int via_coevolve = 0;
    for (int corpus_idx = 0; corpus_idx < 50; ++corpus_idx) {
        GenParams p;
        p.n_sets = 1;
        p.msgs_per_set = 15;
        p.target_util = 0.95;
        p.seed = 9000 + static_cast<std::uint64_t>(corpus_idx);
        MessageSet set = generate_message_set(p, 0);

        bool found = false;
        // scenario search: critical instant first, then random scenarios
        Ticks horizon = std::min<Ticks>(default_horizon(set).horizon, 200000);
        if (scenario_fitness(set, critical_instant_scenario(set, horizon),
                             cands, cfg) >= 1)
            found = true;
        Rng rng = Rng::stream(777, static_cast<std::uint64_t>(corpus_idx));
        for (int trial = 0; !found && trial < 40; ++trial) {
            Scenario s;
            s.horizon = horizon;
            for (const Message& m : set.messages()) {
                Scenario::PerMessage e;
                e.offset = rng.range(0, m.t - 1);
                e.first_jitter = rng.range(0, m.j);
                e.later_jitter = rng.range(0, m.j);
                s.entries.push_back(e);
            }
            if (scenario_fitness(set, s, cands, cfg) >= 1)
                found = true;
        }
        if (found)
            ++refuted;
    }

    // The co-evolution loop finds refuting scenarios too: its hardest
    // scenario must refute the optimistic formula on its own set.
    {
        GenParams p;
        p.n_sets = 4;
        p.msgs_per_set = 12;
        p.target_util = 0.95;
        p.seed = 4242;
        Corpus corpus = generate_corpus_in_memory(p);
        EvoConfig evo;
        evo.population = 30;
        evo.generations = 0;
        evo.seed = 7;
        CoevoConfig co;
        co.rounds = 1;
        co.test_epochs = 2;
        co.scenario_epochs = 4;
        co.scenario_population = 20;
        co.top_n = 5;
        CoevoResult res = coevolve(corpus, evo, FitnessConfig{}, co, cfg);
        for (const ScenarioGene& g : res.hardest) {
            if (scenario_fitness(corpus.sets[g.set_index], g.scenario, cands,
                                 cfg) >= 1) {
                ++via_coevolve;
                break;
            }
        }
    }

    bool ok = refuted >= 1;
    std::ostringstream detail;
    detail << refuted << "/50 corpora refuted by scenario search, coevolve "
           << (via_coevolve ? "also produced a refuting scenario"
                            : "produced no refuting scenario");
    record(7, "simulation refutation", ok, detail.str(), timer.seconds());
}

// --- Criterion 8: allocation GA + breakdown certificates ---------------------

TaskGraph allocation_instance() {
    std::vector<Task> tasks = {
        {"t1", 25, 100, 100, 1}, {"t2", 30, 120, 120, 2},
        {"t3", 20, 100, 100, 3}, {"t4", 40, 160, 160, 4},
        {"t5", 30, 150, 150, 5}, {"t6", 20, 80, 80, 6},
        {"t7", 25, 200, 200, 7}, {"t8", 15, 60, 60, 8},
    };
    std::vector<Edge> edges = {
        {"t1", "t4", {"f1", 1, 5, 100, 100, 0}},
        {"t2", "t5", {"f2", 2, 5, 120, 120, 0}},
        {"t6", "t7", {"f3", 3, 5, 80, 80, 0}},
        {"t3", "t8", {"f4", 4, 5, 100, 100, 0}},
    };
    return TaskGraph::validate(std::move(tasks), std::move(edges));
}

void criterion8() {
    Timer timer;
    AnalysisConfig cfg;
    TaskGraph tg = allocation_instance();
    Platform platform{3};
    const std::int64_t full =
        static_cast<std::int64_t>(tg.tasks().size() + tg.edges().size());

    // Exhaustively certify that a fully schedulable allocation exists.
    std::int64_t best_count = -1;
    AllocationChromosome best_chrom;
    long long full_count_allocs = 0;
    for (int code = 0; code < 6561; ++code) {
        AllocationChromosome chrom;
        int c = code;
        for (int g = 0; g < 8; ++g) {
            chrom.genes.push_back(c % 3);
            c /= 3;
        }
        AllocFitness fit = allocation_fitness(tg, platform, chrom, cfg);
        if (fit.count > best_count) {
            best_count = fit.count;
            best_chrom = chrom;
        }
        if (fit.count == full)
            ++full_count_allocs;
    }
    bool certified = best_count == full;

    // GA reaches the certified optimum in >= 4/5 seeds within 200 generations.
    int ga_hits = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        EvoConfig evo;
        evo.population = 60;
        evo.generations = 200;
        evo.seed = seed;
        AllocResult res = evolve_allocation(tg, platform, evo,
                                            AllocFitnessKind::count, cfg);
        if (res.fitness.count == full)
            ++ga_hits;
    }

    // Breakdown certificates on 100 random chromosomes.
    Rng rng(31337);
    int cert_ok = 0;
    for (int trial = 0; trial < 100; ++trial) {
        AllocationChromosome chrom;
        for (int g = 0; g < 8; ++g)
            chrom.genes.push_back(static_cast<int>(rng.below(3)));
        AllocFitness bd = breakdown_frequency(tg, platform, chrom, cfg);
        if (bd.breakdown_infinite()) {
            ++cert_ok; // nothing to certify; f_max bound checked inside
            continue;
        }
        bool at = schedulable_at(tg, platform, chrom, cfg, bd.breakdown_num,
                                 bd.breakdown_den);
        bool below = bd.breakdown_num == 1 ||
                     !schedulable_at(tg, platform, chrom, cfg,
                                     bd.breakdown_num - 1, bd.breakdown_den);
        if (at && below)
            ++cert_ok;
    }

    // A nominal-schedulable chromosome has breakdown frequency <= 1.
    AllocFitness nominal_bd =
        breakdown_frequency(tg, platform, best_chrom, cfg);
    bool nominal_ok = certified && !nominal_bd.breakdown_infinite() &&
                      nominal_bd.breakdown() <= 1.0;

    bool ok = certified && ga_hits >= 4 && cert_ok == 100 && nominal_ok;
    std::ostringstream detail;
    detail << "exhaustive best " << best_count << "/" << full << " ("
           << full_count_allocs << " full allocations), GA " << ga_hits
           << "/5 seeds, certificates " << cert_ok << "/100, nominal f*="
           << fmt(nominal_bd.breakdown());
    record(8, "allocation GA + breakdown certificates", ok, detail.str(),
           timer.seconds());
}

} // namespace

int main() {
    std::printf("rtevo acceptance suite\n");
    Timer total;

    criterion1();

    Corpus corpus = generate_corpus_in_memory(corpus_params());
    criterion2(corpus);
    criterion3(corpus);
    criterion4(corpus);
    criterion5();
    criterion6();
    criterion7();
    criterion8();

    int failures = 0;
    for (const Outcome& o : g_results) {
        std::printf("%s criterion %d (%s): %s [%ss]\n",
                    o.pass ? "PASS" : "FAIL", o.id, o.name.c_str(),
                    o.detail.c_str(), fmt(o.seconds).c_str());
        if (!o.pass)
            ++failures;
    }
    std::printf("%d/%zu criteria passed in %ss\n",
                static_cast<int>(g_results.size()) - failures,
                g_results.size(), fmt(total.seconds()).c_str());
    return failures;
}
