#include "rtevo/alloc.hpp"

#include <algorithm>

#include "rtevo/analysis.hpp"
#include "rtevo/parallel.hpp"
#include "rtevo/rng.hpp"

namespace rtevo {

bool AllocFitness::better_than(const AllocFitness& o) const {
    if (kind == AllocFitnessKind::count)
        return count > o.count;
    if (breakdown_infinite() != o.breakdown_infinite())
        return !breakdown_infinite();
    if (breakdown_infinite())
        return false;
    return breakdown_num < o.breakdown_num;
}

namespace {

void check_chromosome(const TaskGraph& tg, const Platform& platform,
                      const AllocationChromosome& chrom) {
    if (chrom.genes.size() != tg.tasks().size())
        throw Error(Errc::invalid_chromosome,
                    "gene count does not match task count");
    for (int g : chrom.genes) {
        if (g < 0 || g >= platform.node_count)
            throw Error(Errc::invalid_chromosome,
                        "node index " + std::to_string(g) + " out of range");
    }
}

Ticks scale_c(Ticks c, std::int64_t num, std::int64_t den) {
    // ceil(C / f) with f = num/den, in integer arithmetic.
    return ceil_div(checked_mul(c, den), num);
}

struct SystemVerdict {
    std::int64_t schedulable_tasks = 0;
    std::int64_t schedulable_edges = 0;
    std::int64_t total = 0;
    bool fully_schedulable = true;
};

// Preemptive fixed-priority RTA on one node:
//   R = C_i + sum_{k in hp(i), same node} ceil(R / T_k) * C_k
// (tasks carry no release jitter). Returns converged R or -1.
Ticks task_response(const std::vector<const Task*>& node_tasks,
                    std::size_t which, Ticks own_c,
                    const std::vector<Ticks>& cs, const AnalysisConfig& cfg) {
    const Task& ti = *node_tasks[which];
    const Ticks cap = cfg.cap_for(ti.d, ti.t);
    Ticks prev = own_c;
    for (int m = 1; m <= cfg.iter_limit; ++m) {
        Ticks next = own_c;
        for (std::size_t k = 0; k < which; ++k) {
            Ticks inst = ceil_div(prev, node_tasks[k]->t);
            next = checked_add(next, checked_mul(inst, cs[k]));
        }
        if (next == prev)
            return next;
        if (next > cap)
            return -1;
        prev = next;
    }
    return -1;
}

SystemVerdict evaluate_system(const TaskGraph& tg, const Platform& platform,
                              const AllocationChromosome& chrom,
                              const AnalysisConfig& cfg, std::int64_t f_num,
                              std::int64_t f_den) {
    SystemVerdict verdict;
    verdict.total = static_cast<std::int64_t>(tg.tasks().size() +
                                              tg.edges().size());

    // Group tasks by node, priority order within each node.
    std::vector<std::vector<const Task*>> by_node(platform.node_count);
    std::vector<std::vector<std::size_t>> idx_by_node(platform.node_count);
    for (std::size_t t = 0; t < tg.tasks().size(); ++t) {
        by_node[chrom.genes[t]].push_back(&tg.tasks()[t]);
        idx_by_node[chrom.genes[t]].push_back(t);
    }
    std::vector<Ticks> response(tg.tasks().size(), -1);
    for (int n = 0; n < platform.node_count; ++n) {
        auto& tasks = by_node[n];
        std::vector<std::size_t> order(tasks.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return tasks[a]->priority < tasks[b]->priority;
        });
        std::vector<const Task*> sorted;
        std::vector<std::size_t> sorted_idx;
        for (std::size_t i : order) {
            sorted.push_back(tasks[i]);
            sorted_idx.push_back(idx_by_node[n][i]);
        }
        std::vector<Ticks> cs;
        for (const Task* t : sorted)
            cs.push_back(scale_c(t->wcet, f_num, f_den));
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            Ticks r = task_response(sorted, i, cs[i], cs, cfg);
            response[sorted_idx[i]] = r;
            if (r >= 0 && r <= sorted[i]->d)
                ++verdict.schedulable_tasks;
            else
                verdict.fully_schedulable = false;
        }
    }

    // Bus: cross-node edges become frames; frame jitter is the sender's
    // response time. An unschedulable sender forces its frame unschedulable
    // but the frame still loads the bus (with jitter bounded by the sender's
    // deadline, the value it would have if the sender just made it).
    std::vector<Message> frames;
    std::vector<bool> forced_unschedulable;
    std::int64_t local_edges = 0;
    for (const Edge& e : tg.edges()) {
        std::size_t src = tg.task_index(e.src);
        std::size_t dst = tg.task_index(e.dst);
        if (chrom.genes[src] == chrom.genes[dst]) {
            ++local_edges; // co-allocated: no bus traffic, schedulable
            continue;
        }
        Message frame = e.frame;
        frame.c = scale_c(frame.c, f_num, f_den);
        const Ticks sender_r = response[src];
        const bool sender_ok =
            sender_r >= 0 && sender_r <= tg.tasks()[src].d;
        frame.j = sender_ok ? sender_r : tg.tasks()[src].d;
        frames.push_back(std::move(frame));
        forced_unschedulable.push_back(!sender_ok);
    }
    verdict.schedulable_edges += local_edges;

    if (!frames.empty()) {
        MessageSet bus = MessageSet::validate(frames);
        for (std::size_t i = 0; i < bus.size(); ++i) {
            // validate() sorted by priority; recover the original position
            // (frame priorities are unique by TaskGraph invariant).
            std::size_t orig = 0;
            while (frames[orig].priority != bus.at(i).priority)
                ++orig;
            RtVerdict v = rta_exact(bus, i, cfg);
            if (!forced_unschedulable[orig] && v.schedulable(bus.at(i).d))
                ++verdict.schedulable_edges;
            else
                verdict.fully_schedulable = false;
        }
    }
    return verdict;
}

} // namespace

AllocFitness allocation_fitness(const TaskGraph& tg, const Platform& platform,
                                const AllocationChromosome& chrom,
                                const AnalysisConfig& cfg) {
    check_chromosome(tg, platform, chrom);
    SystemVerdict v = evaluate_system(tg, platform, chrom, cfg, 1, 1);
    AllocFitness fit;
    fit.kind = AllocFitnessKind::count;
    fit.count = v.schedulable_tasks + v.schedulable_edges;
    fit.total = v.total;
    return fit;
}

bool schedulable_at(const TaskGraph& tg, const Platform& platform,
                    const AllocationChromosome& chrom,
                    const AnalysisConfig& cfg, std::int64_t num,
                    std::int64_t den) {
    check_chromosome(tg, platform, chrom);
    return evaluate_system(tg, platform, chrom, cfg, num, den)
        .fully_schedulable;
}

AllocFitness breakdown_frequency(const TaskGraph& tg, const Platform& platform,
                                 const AllocationChromosome& chrom,
                                 const AnalysisConfig& cfg, std::int64_t den,
                                 std::int64_t f_max) {
    check_chromosome(tg, platform, chrom);
    AllocFitness fit;
    fit.kind = AllocFitnessKind::breakdown;
    fit.breakdown_den = den;
    fit.total = static_cast<std::int64_t>(tg.tasks().size() + tg.edges().size());

    std::int64_t lo = 1;
    std::int64_t hi = checked_mul(f_max, den);
    if (!schedulable_at(tg, platform, chrom, cfg, hi, den)) {
        fit.breakdown_num = -1; // never schedulable
        return fit;
    }
    // schedulable_at is monotone in the frequency factor, so binary search
    // pins the least schedulable numerator.
    while (lo < hi) {
        std::int64_t mid = lo + (hi - lo) / 2;
        if (schedulable_at(tg, platform, chrom, cfg, mid, den))
            hi = mid;
        else
            lo = mid + 1;
    }
    fit.breakdown_num = hi;
    return fit;
}

AllocResult evolve_allocation(const TaskGraph& tg, const Platform& platform,
                              const EvoConfig& evo, AllocFitnessKind kind,
                              const AnalysisConfig& cfg, unsigned threads) {
    evo.check();
    cfg.check();
    if (platform.node_count < 1)
        throw Error(Errc::invalid_config, "node_count must be >= 1");

    const std::size_t n_genes = tg.tasks().size();
    constexpr std::uint64_t kTagAlloc = 0x416c;

    struct Ind {
        AllocationChromosome chrom;
        AllocFitness fitness;
    };
    std::vector<Ind> pop(evo.population);
    for (int slot = 0; slot < evo.population; ++slot) {
        Rng rng = Rng::stream(evo.seed, kTagAlloc, 0,
                              static_cast<std::uint64_t>(slot));
        pop[slot].chrom.genes.resize(n_genes);
        for (auto& g : pop[slot].chrom.genes)
            g = static_cast<int>(rng.below(platform.node_count));
    }

    auto evaluate = [&](std::vector<Ind>& population) {
        parallel_for(population.size(), threads, [&](std::size_t i) {
            population[i].fitness =
                kind == AllocFitnessKind::count
                    ? allocation_fitness(tg, platform, population[i].chrom, cfg)
                    : breakdown_frequency(tg, platform, population[i].chrom,
                                          cfg);
        });
    };

    auto order_of = [&](const std::vector<Ind>& population) {
        std::vector<std::size_t> order(population.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) {
                             return population[a].fitness.better_than(
                                 population[b].fitness);
                         });
        return order;
    };

    AllocResult result;
    auto record = [&](const std::vector<Ind>& population, int gen) {
        auto order = order_of(population);
        AllocGenerationStats row;
        row.generation = gen;
        row.best = population[order[0]].fitness;
        double sum = 0;
        for (const Ind& ind : population)
            sum += static_cast<double>(ind.fitness.count);
        row.mean_count = sum / static_cast<double>(population.size());
        result.history.push_back(row);
    };

    evaluate(pop);
    record(pop, 0);
    for (int gen = 1; gen <= evo.generations; ++gen) {
        auto order = order_of(pop);
        std::vector<Ind> next(pop.size());
        for (int e = 0; e < evo.elitism; ++e)
            next[e] = pop[order[e]];
        for (std::size_t slot = static_cast<std::size_t>(evo.elitism);
             slot < pop.size(); ++slot) {
            Rng rng = Rng::stream(evo.seed, kTagAlloc,
                                  static_cast<std::uint64_t>(gen),
                                  static_cast<std::uint64_t>(slot));
            auto pick = [&]() -> const Ind& {
                std::size_t w = static_cast<std::size_t>(rng.below(pop.size()));
                for (int t = 1; t < evo.tournament; ++t) {
                    std::size_t o =
                        static_cast<std::size_t>(rng.below(pop.size()));
                    if (pop[o].fitness.better_than(pop[w].fitness) ||
                        (!pop[w].fitness.better_than(pop[o].fitness) && o < w))
                        w = o;
                }
                return pop[w];
            };
            const Ind& pa = pick();
            const Ind& pb = pick();
            Ind child;
            child.chrom = pa.chrom;
            if (n_genes > 1 && rng.real01() < evo.crossover_rate) {
                std::size_t cut =
                    1 + static_cast<std::size_t>(rng.below(n_genes - 1));
                for (std::size_t g = cut; g < n_genes; ++g)
                    child.chrom.genes[g] = pb.chrom.genes[g];
            }
            for (auto& g : child.chrom.genes) {
                if (rng.real01() < evo.mutation_rate)
                    g = static_cast<int>(rng.below(platform.node_count));
            }
            next[slot] = std::move(child);
        }
        pop = std::move(next);
        evaluate(pop);
        record(pop, gen);
    }

    auto order = order_of(pop);
    result.best = pop[order[0]].chrom;
    result.fitness = pop[order[0]].fitness;
    return result;
}

} // namespace rtevo
