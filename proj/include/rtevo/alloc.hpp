#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rtevo/evolve.hpp"
#include "rtevo/model.hpp"

namespace rtevo {

// Task-to-node assignment; genes[t] is the node index of task t (in
// TaskGraph order).
struct AllocationChromosome {
    std::vector<int> genes;

    bool operator==(const AllocationChromosome&) const = default;
};

enum class AllocFitnessKind { count, breakdown };

// Either the schedulable-component count (higher is better) or the
// breakdown frequency f* = num/den (lower is better; infinite when the
// system is unschedulable even at f_max).
struct AllocFitness {
    AllocFitnessKind kind = AllocFitnessKind::count;
    std::int64_t count = 0;
    std::int64_t total = 0;
    std::int64_t breakdown_num = -1; // -1 encodes +inf
    std::int64_t breakdown_den = 1024;

    bool breakdown_infinite() const { return breakdown_num < 0; }
    double breakdown() const {
        return breakdown_infinite()
                   ? std::numeric_limits<double>::infinity()
                   : static_cast<double>(breakdown_num) /
                         static_cast<double>(breakdown_den);
    }

    bool better_than(const AllocFitness& o) const;
};

// Per-node preemptive fixed-priority response-time analysis for tasks;
// cross-node edges become CAN frames whose jitter is the sender's response
// time, analyzed with the exact bus test. Count = schedulable tasks +
// schedulable edges (co-allocated edges are schedulable with zero bus load).
AllocFitness allocation_fitness(const TaskGraph& tg, const Platform& platform,
                                const AllocationChromosome& chrom,
                                const AnalysisConfig& cfg);

// True iff every task and edge is schedulable with every C replaced by
// ceil(C * den / num), i.e. at frequency factor num/den.
bool schedulable_at(const TaskGraph& tg, const Platform& platform,
                    const AllocationChromosome& chrom,
                    const AnalysisConfig& cfg, std::int64_t num,
                    std::int64_t den);

// Binary search for the least frequency factor (to within 1/den) that makes
// the system fully schedulable; searches [1/den, f_max].
AllocFitness breakdown_frequency(const TaskGraph& tg, const Platform& platform,
                                 const AllocationChromosome& chrom,
                                 const AnalysisConfig& cfg,
                                 std::int64_t den = 1024,
                                 std::int64_t f_max = 16);

struct AllocGenerationStats {
    int generation = 0;
    AllocFitness best;
    double mean_count = 0.0; // mean schedulable count (count mode only)
};

struct AllocResult {
    AllocationChromosome best;
    AllocFitness fitness;
    std::vector<AllocGenerationStats> history;
};

// GA over allocation chromosomes: tournament selection, single-point
// crossover, per-gene uniform redraw mutation, elitism; deterministic under
// the seed.
AllocResult evolve_allocation(const TaskGraph& tg, const Platform& platform,
                              const EvoConfig& evo, AllocFitnessKind kind,
                              const AnalysisConfig& cfg, unsigned threads = 1);

} // namespace rtevo
