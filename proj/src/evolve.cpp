#include "rtevo/evolve.hpp"

#include <algorithm>
#include <mutex>
#include <unordered_map>

#include "rtevo/analysis.hpp"
#include "rtevo/parallel.hpp"
#include "rtevo/rng.hpp"

namespace rtevo {

PreparedCorpus PreparedCorpus::prepare(const Corpus& corpus) {
    PreparedCorpus p;
    p.corpus = &corpus;
    p.bound.resize(corpus.sets.size());
    p.deadline.resize(corpus.sets.size());
    for (std::size_t s = 0; s < corpus.sets.size(); ++s) {
        const MessageSet& set = corpus.sets[s];
        p.bound[s].reserve(set.size());
        p.deadline[s].reserve(set.size());
        for (std::size_t i = 0; i < set.size(); ++i) {
            p.bound[s].push_back(BoundMessage::bind(set, i));
            p.deadline[s].push_back(set.at(i).d);
        }
    }
    return p;
}

std::size_t PreparedCorpus::total_messages() const {
    std::size_t n = 0;
    for (const auto& set : bound)
        n += set.size();
    return n;
}

OracleTable OracleTable::compute(const Corpus& corpus, OracleKind kind,
                                 const AnalysisConfig& cfg) {
    OracleTable table;
    table.r.resize(corpus.sets.size());
    table.valid.resize(corpus.sets.size());
    for (std::size_t s = 0; s < corpus.sets.size(); ++s) {
        const MessageSet& set = corpus.sets[s];
        auto& rs = table.r[s];
        auto& vs = table.valid[s];
        rs.assign(set.size(), 0);
        vs.assign(set.size(), 0);
        if (kind == OracleKind::exact) {
            for (std::size_t i = 0; i < set.size(); ++i) {
                RtVerdict v = rta_exact(set, i, cfg);
                if (v.converged()) {
                    rs[i] = v.r;
                    vs[i] = 1;
                } else {
                    ++table.excluded;
                }
            }
        } else {
            HorizonInfo h = default_horizon(set);
            SimResult sim =
                simulate(set, critical_instant_scenario(set, h.horizon));
            for (std::size_t i = 0; i < set.size(); ++i) {
                if (sim.per_message[i].instances > 0) {
                    rs[i] = sim.per_message[i].watermark;
                    vs[i] = 1;
                } else {
                    ++table.excluded;
                }
            }
        }
    }
    return table;
}

FormulaScore score_formula(const Formula& f, const PreparedCorpus& prep,
                           const OracleTable& oracle, const FitnessConfig& fc,
                           const AnalysisConfig& cfg) {
    CompiledFormula cf(f);
    FormulaScore score;
    score.set_schedulable.assign(prep.bound.size(), 1);
    for (std::size_t s = 0; s < prep.bound.size(); ++s) {
        for (std::size_t i = 0; i < prep.bound[s].size(); ++i) {
            EvalOutcome out = cf.eval(prep.bound[s][i], cfg);
            if (!out.is_value || out.value > prep.deadline[s][i])
                score.set_schedulable[s] = 0;

            if (!oracle.valid[s][i])
                continue; // oracle failed here: excluded and flagged
            std::int64_t err;
            if (!out.is_value) {
                err = fc.p_div;
                ++score.divergent;
            } else if (out.value >= oracle.r[s][i]) {
                err = checked_sub(out.value, oracle.r[s][i]);
            } else {
                err = checked_add(
                    checked_mul(fc.p_opt,
                                checked_sub(oracle.r[s][i], out.value)),
                    fc.k_opt);
                ++score.optimistic;
            }
            score.fitness = checked_add(score.fitness, err);
        }
    }
    return score;
}

std::int64_t fitness_of_formula(const Formula& f, const Corpus& corpus,
                                const FitnessConfig& fc,
                                const AnalysisConfig& cfg) {
    fc.check();
    PreparedCorpus prep = PreparedCorpus::prepare(corpus);
    OracleTable oracle = OracleTable::compute(corpus, fc.oracle, cfg);
    return score_formula(f, prep, oracle, fc, cfg).fitness;
}

double normalized_fitness(const Formula& f, const Corpus& corpus,
                          const FitnessConfig& fc, const AnalysisConfig& cfg) {
    fc.check();
    PreparedCorpus prep = PreparedCorpus::prepare(corpus);
    OracleTable oracle = OracleTable::compute(corpus, fc.oracle, cfg);
    std::int64_t base =
        score_formula(builtin(1), prep, oracle, fc, cfg).fitness;
    std::int64_t own = score_formula(f, prep, oracle, fc, cfg).fitness;
    return static_cast<double>(own) /
           static_cast<double>(std::max<std::int64_t>(base, 1));
}

// --- GE engine ----------------------------------------------------------------

namespace {

constexpr std::uint32_t kCodonRange = 1u << 16;

// Stream tags keep test evolution, scenario evolution, and initialization
// draws on disjoint RNG streams.
constexpr std::uint64_t kTagTests = 0x7465;
constexpr std::uint64_t kTagScenarios = 0x5363;

struct ScoreCache {
    std::unordered_map<std::string, FormulaScore> map;
    std::mutex mutex;

    const FormulaScore* find(const std::string& key) {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = map.find(key);
        return it == map.end() ? nullptr : &it->second;
    }
    void insert(const std::string& key, FormulaScore score) {
        std::lock_guard<std::mutex> lock(mutex);
        map.emplace(key, std::move(score));
    }
};

struct Individual {
    Genotype geno;
    bool mapped = false;
    Formula formula;
    std::string text;
    std::int64_t fitness = 0;
};

struct Engine {
    const PreparedCorpus& prep;
    const OracleTable& oracle;
    const EvoConfig& evo;
    const FitnessConfig& fc;
    const AnalysisConfig& cfg;
    const Grammar& grammar;
    unsigned threads;
    const std::vector<PoolObservation>* pool = nullptr;
    ScoreCache cache;
    bool have_best = false;

    std::int64_t incomplete_fitness() const {
        return checked_mul(
            fc.p_div, static_cast<std::int64_t>(prep.total_messages()));
    }

    Genotype random_genotype(Rng& rng) const {
        Genotype g;
        g.codons.resize(evo.codon_length);
        for (auto& c : g.codons)
            c = static_cast<std::uint32_t>(rng.below(kCodonRange));
        return g;
    }

    std::vector<Individual> init_population() const {
        std::vector<Individual> pop(evo.population);
        for (int slot = 0; slot < evo.population; ++slot) {
            Rng rng = Rng::stream(evo.seed, kTagTests, 0,
                                  static_cast<std::uint64_t>(slot));
            pop[slot].geno = random_genotype(rng);
        }
        return pop;
    }

    void evaluate(std::vector<Individual>& pop) {
        parallel_for(pop.size(), threads, [&](std::size_t i) {
            Individual& ind = pop[i];
            std::optional<Formula> f = map_genotype(ind.geno, grammar);
            if (!f) {
                ind.mapped = false;
                ind.text.clear();
                ind.fitness = incomplete_fitness();
                return;
            }
            ind.mapped = true;
            ind.formula = std::move(*f);
            ind.text = render_formula(ind.formula);
            const FormulaScore* cached = cache.find(ind.text);
            FormulaScore local;
            if (!cached) {
                local = score_formula(ind.formula, prep, oracle, fc, cfg);
                cache.insert(ind.text, local);
                cached = &local;
            }
            std::int64_t fit = cached->fitness;
            if (pool)
                fit = augment_with_refutations(fit, *cached, *pool, fc);
            ind.fitness = fit;
        });
    }

    static std::size_t best_of(const std::vector<Individual>& pop) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < pop.size(); ++i) {
            if (pop[i].fitness < pop[best].fitness)
                best = i;
        }
        return best;
    }

    void record(const std::vector<Individual>& pop, int gen,
                RunHistory& hist) {
        GenerationStats row;
        row.generation = gen;
        std::size_t best = best_of(pop);
        row.best_fitness = pop[best].fitness;
        double sum = 0.0;
        for (const Individual& ind : pop)
            sum += static_cast<double>(ind.fitness);
        row.mean_fitness = sum / static_cast<double>(pop.size());
        row.best_formula = pop[best].mapped ? pop[best].text : "(incomplete)";
        hist.generations.push_back(std::move(row));

        if (pop[best].mapped &&
            (!have_best || pop[best].fitness <= hist.best_fitness)) {
            hist.best = pop[best].formula;
            hist.best_fitness = pop[best].fitness;
            have_best = true;
        }
    }

    std::size_t tournament_pick(const std::vector<Individual>& pop,
                                Rng& rng) const {
        std::size_t winner = static_cast<std::size_t>(rng.below(pop.size()));
        for (int t = 1; t < evo.tournament; ++t) {
            std::size_t other = static_cast<std::size_t>(rng.below(pop.size()));
            if (pop[other].fitness < pop[winner].fitness ||
                (pop[other].fitness == pop[winner].fitness && other < winner))
                winner = other;
        }
        return winner;
    }

    // One generational step: elites survive verbatim, the rest come from
    // tournament selection, one-point codon crossover, per-codon mutation.
    std::vector<Individual> step(const std::vector<Individual>& pop, int gen) {
        std::vector<std::size_t> order(pop.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) {
                             return pop[a].fitness < pop[b].fitness;
                         });

        std::vector<Individual> next(pop.size());
        for (int e = 0; e < evo.elitism; ++e)
            next[e] = pop[order[e]];

        for (std::size_t slot = static_cast<std::size_t>(evo.elitism);
             slot < pop.size(); ++slot) {
            Rng rng = Rng::stream(evo.seed, kTagTests,
                                  static_cast<std::uint64_t>(gen),
                                  static_cast<std::uint64_t>(slot));
            const Individual& pa = pop[tournament_pick(pop, rng)];
            const Individual& pb = pop[tournament_pick(pop, rng)];
            Genotype child = pa.geno;
            if (rng.real01() < evo.crossover_rate && child.codons.size() > 1) {
                std::size_t cut = 1 + static_cast<std::size_t>(rng.below(
                                          child.codons.size() - 1));
                for (std::size_t c = cut; c < child.codons.size(); ++c)
                    child.codons[c] = pb.geno.codons[c];
            }
            for (auto& codon : child.codons) {
                if (rng.real01() < evo.mutation_rate)
                    codon = static_cast<std::uint32_t>(rng.below(kCodonRange));
            }
            next[slot].geno = std::move(child);
        }
        return next;
    }
};

} // namespace

RunHistory evolve_tests(const Corpus& corpus, const EvoConfig& evo,
                        const FitnessConfig& fc, const AnalysisConfig& cfg,
                        const Grammar& grammar, unsigned threads) {
    evo.check();
    fc.check();
    cfg.check();
    if (corpus.sets.empty())
        throw Error(Errc::invalid_config, "corpus must be non-empty");

    PreparedCorpus prep = PreparedCorpus::prepare(corpus);
    OracleTable oracle = OracleTable::compute(corpus, fc.oracle, cfg);
    Engine engine{prep, oracle, evo, fc, cfg, grammar, threads, nullptr, {}, false};

    RunHistory hist;
    std::vector<Individual> pop = engine.init_population();
    engine.evaluate(pop);
    engine.record(pop, 0, hist);
    for (int gen = 1; gen <= evo.generations; ++gen) {
        pop = engine.step(pop, gen);
        engine.evaluate(pop);
        engine.record(pop, gen, hist);
    }
    if (!engine.have_best)
        throw Error(Errc::invalid_config,
                    "no genotype mapped to a formula in any generation");
    return hist;
}

// --- Scenario co-evolution ------------------------------------------------------

std::int64_t augment_with_refutations(std::int64_t fitness,
                                      const FormulaScore& score,
                                      std::span<const PoolObservation> pool,
                                      const FitnessConfig& fc) {
    for (const PoolObservation& obs : pool) {
        if (obs.has_miss && score.set_schedulable[obs.set_index])
            fitness = checked_add(fitness, fc.p_div);
    }
    return fitness;
}

int scenario_fitness(const MessageSet& set, const Scenario& scenario,
                     std::span<const Formula> candidates,
                     const AnalysisConfig& cfg) {
    SimResult sim = simulate(set, scenario);
    if (!sim.first_miss)
        return 0; // refutation requires a miss
    int count = 0;
    for (const Formula& f : candidates) {
        CompiledFormula cf(f);
        bool schedulable = true;
        for (std::size_t i = 0; i < set.size() && schedulable; ++i) {
            EvalOutcome out = cf.eval(BoundMessage::bind(set, i), cfg);
            schedulable = out.is_value && out.value <= set.at(i).d;
        }
        if (schedulable)
            ++count;
    }
    return count;
}

namespace {

struct ScenarioIndividual {
    ScenarioGene gene;
    bool has_miss = false;
    int refutations = 0;
};

ScenarioGene random_scenario(const Corpus& corpus, Ticks horizon_cap,
                             Rng& rng) {
    ScenarioGene g;
    g.set_index = static_cast<std::size_t>(rng.below(corpus.sets.size()));
    const MessageSet& set = corpus.sets[g.set_index];
    g.scenario.entries.resize(set.size());
    Ticks max_offset = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        const Message& m = set.at(i);
        auto& e = g.scenario.entries[i];
        e.offset = rng.range(0, m.t - 1);
        e.first_jitter = rng.range(0, m.j);
        e.later_jitter = rng.range(0, m.j);
        max_offset = std::max(max_offset, e.offset);
    }
    g.scenario.horizon =
        std::min(horizon_cap, default_horizon(set, max_offset).horizon);
    return g;
}

void mutate_scenario(ScenarioGene& g, const Corpus& corpus, double rate,
                     Rng& rng) {
    const MessageSet& set = corpus.sets[g.set_index];
    for (std::size_t i = 0; i < set.size(); ++i) {
        const Message& m = set.at(i);
        auto& e = g.scenario.entries[i];
        if (rng.real01() < rate)
            e.offset = rng.range(0, m.t - 1);
        if (rng.real01() < rate)
            e.first_jitter = rng.range(0, m.j);
        if (rng.real01() < rate)
            e.later_jitter = rng.range(0, m.j);
    }
}

} // namespace

CoevoResult coevolve(const Corpus& corpus, const EvoConfig& evo,
                     const FitnessConfig& fc, const CoevoConfig& co,
                     const AnalysisConfig& cfg, unsigned threads) {
    evo.check();
    fc.check();
    co.check();
    cfg.check();
    if (corpus.sets.empty())
        throw Error(Errc::invalid_config, "corpus must be non-empty");

    PreparedCorpus prep = PreparedCorpus::prepare(corpus);
    OracleTable oracle = OracleTable::compute(corpus, fc.oracle, cfg);
    std::vector<PoolObservation> pool;
    const Grammar grammar = Grammar::standard();
    Engine engine{prep, oracle, evo, fc, cfg, grammar, threads, nullptr, {}, false};
    engine.pool = &pool;

    CoevoResult result;

    // Test population, generation counter continuing across rounds.
    std::vector<Individual> tests = engine.init_population();
    engine.evaluate(tests);
    int test_gen = 0;
    engine.record(tests, test_gen, result.test_history);

    // Scenario population.
    std::vector<ScenarioIndividual> scens(co.scenario_population);
    for (int slot = 0; slot < co.scenario_population; ++slot) {
        Rng rng = Rng::stream(evo.seed, kTagScenarios, 0,
                              static_cast<std::uint64_t>(slot));
        scens[slot].gene = random_scenario(corpus, co.scenario_horizon, rng);
    }

    auto top_tests = [&]() {
        std::vector<std::size_t> order(tests.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) {
                             return tests[a].fitness < tests[b].fitness;
                         });
        std::vector<Formula> out;
        std::vector<std::string> seen;
        for (std::size_t idx : order) {
            if (!tests[idx].mapped)
                continue;
            if (std::find(seen.begin(), seen.end(), tests[idx].text) !=
                seen.end())
                continue;
            seen.push_back(tests[idx].text);
            out.push_back(tests[idx].formula);
            if (static_cast<int>(out.size()) == co.top_n)
                break;
        }
        return out;
    };

    auto evaluate_scenarios = [&](std::vector<ScenarioIndividual>& population,
                                  const std::vector<Formula>& cands) {
        // Candidate set-schedulability is scenario-independent; hoist it.
        std::vector<std::vector<char>> cand_sched(cands.size());
        for (std::size_t j = 0; j < cands.size(); ++j) {
            const std::string key = render_formula(cands[j]);
            const FormulaScore* cached = engine.cache.find(key);
            FormulaScore local;
            if (!cached) {
                local = score_formula(cands[j], prep, oracle, fc, cfg);
                engine.cache.insert(key, local);
                cached = &local;
            }
            cand_sched[j] = cached->set_schedulable;
        }
        parallel_for(population.size(), threads, [&](std::size_t i) {
            ScenarioIndividual& si = population[i];
            SimResult sim =
                simulate(corpus.sets[si.gene.set_index], si.gene.scenario);
            si.has_miss = sim.first_miss.has_value();
            si.refutations = 0;
            if (!si.has_miss)
                return;
            for (std::size_t j = 0; j < cands.size(); ++j) {
                if (cand_sched[j][si.gene.set_index])
                    ++si.refutations;
            }
        });
    };

    std::vector<Formula> cands = top_tests();
    evaluate_scenarios(scens, cands);
    int scen_gen = 0;
    {
        GenerationStats row;
        row.generation = scen_gen;
        int best = 0;
        double sum = 0;
        for (const auto& s : scens) {
            best = std::max(best, s.refutations);
            sum += s.refutations;
        }
        row.best_fitness = best;
        row.mean_fitness = sum / static_cast<double>(scens.size());
        result.scenario_history.push_back(row);
    }

    auto scenario_step = [&](int gen) {
        std::vector<std::size_t> order(scens.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) {
                             return scens[a].refutations > scens[b].refutations;
                         });
        std::vector<ScenarioIndividual> next(scens.size());
        const int elites = std::min<int>(evo.elitism, static_cast<int>(scens.size()));
        for (int e = 0; e < elites; ++e)
            next[e] = scens[order[e]];
        for (std::size_t slot = static_cast<std::size_t>(elites);
             slot < scens.size(); ++slot) {
            Rng rng = Rng::stream(evo.seed, kTagScenarios,
                                  static_cast<std::uint64_t>(gen),
                                  static_cast<std::uint64_t>(slot));
            auto pick = [&]() -> const ScenarioIndividual& {
                std::size_t w = static_cast<std::size_t>(rng.below(scens.size()));
                for (int t = 1; t < evo.tournament; ++t) {
                    std::size_t o =
                        static_cast<std::size_t>(rng.below(scens.size()));
                    if (scens[o].refutations > scens[w].refutations ||
                        (scens[o].refutations == scens[w].refutations && o < w))
                        w = o;
                }
                return scens[w];
            };
            const ScenarioIndividual& pa = pick();
            const ScenarioIndividual& pb = pick();
            ScenarioIndividual child = pa;
            if (pa.gene.set_index == pb.gene.set_index &&
                rng.real01() < evo.crossover_rate &&
                child.gene.scenario.entries.size() > 1) {
                std::size_t cut = 1 + static_cast<std::size_t>(rng.below(
                                          child.gene.scenario.entries.size() - 1));
                for (std::size_t i = cut; i < child.gene.scenario.entries.size();
                     ++i)
                    child.gene.scenario.entries[i] =
                        pb.gene.scenario.entries[i];
            }
            // Occasionally restart on a fresh set to keep coverage.
            if (rng.real01() < 0.05) {
                child.gene = random_scenario(corpus, co.scenario_horizon, rng);
            } else {
                mutate_scenario(child.gene, corpus, evo.mutation_rate, rng);
            }
            next[slot] = std::move(child);
        }
        scens = std::move(next);
    };

    for (int round = 0; round < co.rounds; ++round) {
        // Refresh the refutation pool, then evolve tests against it.
        pool.clear();
        for (const ScenarioIndividual& s : scens)
            pool.push_back({s.gene.set_index, s.has_miss});
        engine.evaluate(tests); // pool changed; re-score fitness
        for (int g = 0; g < co.test_epochs; ++g) {
            ++test_gen;
            tests = engine.step(tests, test_gen);
            engine.evaluate(tests);
            engine.record(tests, test_gen, result.test_history);
        }

        // Evolve scenarios against the current top tests.
        cands = top_tests();
        evaluate_scenarios(scens, cands);
        for (int g = 0; g < co.scenario_epochs; ++g) {
            ++scen_gen;
            scenario_step(scen_gen);
            evaluate_scenarios(scens, cands);
            GenerationStats row;
            row.generation = scen_gen;
            int best = 0;
            double sum = 0;
            for (const auto& s : scens) {
                best = std::max(best, s.refutations);
                sum += s.refutations;
            }
            row.best_fitness = best;
            row.mean_fitness = sum / static_cast<double>(scens.size());
            result.scenario_history.push_back(row);
        }
    }

    result.best_tests = top_tests();
    std::stable_sort(scens.begin(), scens.end(),
                     [](const ScenarioIndividual& a, const ScenarioIndividual& b) {
                         return a.refutations > b.refutations;
                     });
    for (const ScenarioIndividual& s : scens)
        result.hardest.push_back(s.gene);
    return result;
}

} // namespace rtevo
