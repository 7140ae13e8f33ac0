#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rtevo/formula.hpp"
#include "rtevo/gen.hpp"
#include "rtevo/sim.hpp"

namespace rtevo {

enum class OracleKind { exact, sim_watermark };

// Fitness shaping: overshoot costs its magnitude, any optimism costs
// p_opt per tick of gap plus the k_opt offset (so one optimistic message
// dominates any realistic total overshoot), divergence costs p_div flat.
struct FitnessConfig {
    OracleKind oracle = OracleKind::exact;
    std::int64_t p_opt = 1000;
    std::int64_t k_opt = 1'000'000;
    std::int64_t p_div = 10'000'000;

    void check() const {
        if (!(p_div >= k_opt && k_opt >= p_opt && p_opt >= 1))
            throw Error(Errc::invalid_config,
                        "need p_div >= k_opt >= p_opt >= 1");
    }
};

struct EvoConfig {
    int population = 200;
    int generations = 100;
    int tournament = 4;
    double crossover_rate = 0.9; // one-point over codons
    double mutation_rate = 0.02; // per codon, uniform redraw
    int elitism = 2;
    int codon_length = 64;
    std::uint64_t seed = 1;

    void check() const {
        if (population < 1 || generations < 0 || tournament < 1 ||
            elitism < 0 || elitism >= population || codon_length < 1)
            throw Error(Errc::invalid_config, "evolution config out of range");
        if (crossover_rate < 0 || crossover_rate > 1 || mutation_rate < 0 ||
            mutation_rate > 1)
            throw Error(Errc::invalid_config, "rates must be in [0,1]");
    }
};

struct GenerationStats {
    int generation = 0;
    std::int64_t best_fitness = 0;
    double mean_fitness = 0.0;
    std::string best_formula;
};

struct RunHistory {
    std::vector<GenerationStats> generations;
    Formula best;
    std::int64_t best_fitness = 0;
};

// Bound corpus + per-message oracle values, computed once and shared by all
// fitness evaluations.
struct PreparedCorpus {
    const Corpus* corpus = nullptr;
    std::vector<std::vector<BoundMessage>> bound; // [set][msg]
    std::vector<std::vector<Ticks>> deadline;     // [set][msg]

    static PreparedCorpus prepare(const Corpus& corpus);
    std::size_t total_messages() const;
};

struct OracleTable {
    std::vector<std::vector<Ticks>> r;       // [set][msg]
    std::vector<std::vector<char>> valid;    // excluded-and-flagged when 0
    std::size_t excluded = 0;

    static OracleTable compute(const Corpus& corpus, OracleKind kind,
                               const AnalysisConfig& cfg);
};

// Everything one pass over the corpus yields for a formula.
struct FormulaScore {
    std::int64_t fitness = 0;
    std::size_t optimistic = 0;
    std::size_t divergent = 0;
    std::vector<char> set_schedulable; // per set: all Value with r <= d
};

FormulaScore score_formula(const Formula& f, const PreparedCorpus& prep,
                           const OracleTable& oracle, const FitnessConfig& fc,
                           const AnalysisConfig& cfg);

// F = sum over messages of err (lower is better); see FitnessConfig.
std::int64_t fitness_of_formula(const Formula& f, const Corpus& corpus,
                                const FitnessConfig& fc,
                                const AnalysisConfig& cfg);

// F(f) / max(F(builtin(1)), 1) on the same corpus.
double normalized_fitness(const Formula& f, const Corpus& corpus,
                          const FitnessConfig& fc, const AnalysisConfig& cfg);

// Grammatical evolution of response-time tests. Per-individual RNG streams
// derive from (seed, generation, slot), so any worker count reproduces the
// serial history bit for bit.
RunHistory evolve_tests(const Corpus& corpus, const EvoConfig& evo,
                        const FitnessConfig& fc, const AnalysisConfig& cfg,
                        const Grammar& grammar = Grammar::standard(),
                        unsigned threads = 1);

// --- Scenario co-evolution ---------------------------------------------------

// A scenario bound to one corpus set.
struct ScenarioGene {
    std::size_t set_index = 0;
    Scenario scenario;
};

// Number of candidate tests this scenario refutes: tests that deem the set
// schedulable while the simulation shows a deadline miss.
int scenario_fitness(const MessageSet& set, const Scenario& scenario,
                     std::span<const Formula> candidates,
                     const AnalysisConfig& cfg);

// One pool scenario as the test-fitness augmentation sees it.
struct PoolObservation {
    std::size_t set_index = 0;
    bool has_miss = false;
};

// Adds p_div for every pool scenario that refutes the scored formula
// (simulation missed while the formula called the set schedulable).
std::int64_t augment_with_refutations(std::int64_t fitness,
                                      const FormulaScore& score,
                                      std::span<const PoolObservation> pool,
                                      const FitnessConfig& fc);

struct CoevoConfig {
    int rounds = 3;
    int test_epochs = 10;          // E_t: test generations per round
    int scenario_epochs = 10;      // E_s: scenario generations per round
    int scenario_population = 40;
    int top_n = 8;                 // tests the scenario phase attacks
    Ticks scenario_horizon = 200'000; // refutation needs one miss, not a hyperperiod

    void check() const {
        if (rounds < 0 || test_epochs < 1 || scenario_epochs < 1 ||
            scenario_population < 1 || top_n < 1 || scenario_horizon < 1)
            throw Error(Errc::invalid_config, "coevolution config out of range");
    }
};

struct CoevoResult {
    std::vector<Formula> best_tests;     // final top_n by augmented fitness
    std::vector<ScenarioGene> hardest;   // scenarios ranked by refutation count
    RunHistory test_history;             // across all rounds
    std::vector<GenerationStats> scenario_history; // best refutations per epoch
};

// Alternates test evolution (fitness augmented by p_div per refuting pool
// scenario) with scenario evolution against the current top tests.
CoevoResult coevolve(const Corpus& corpus, const EvoConfig& evo,
                     const FitnessConfig& fc, const CoevoConfig& co,
                     const AnalysisConfig& cfg, unsigned threads = 1);

} // namespace rtevo
