#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rtevo/evolve.hpp"

namespace rtevo {

struct ReportRow {
    std::string name;
    std::string formula;
    std::int64_t fitness = 0;
    double normalized = 0.0; // fitness / max(F(eq1), 1)
    std::size_t optimistic = 0;
    std::size_t divergent = 0;
};

// Scores each named formula on the corpus; normalization baseline is
// builtin(1) whether or not it appears in `formulas`.
std::vector<ReportRow> build_report(
    const Corpus& corpus,
    const std::vector<std::pair<std::string, Formula>>& formulas,
    const FitnessConfig& fc, const AnalysisConfig& cfg);

// Minimal self-contained bar chart of normalized fitness values.
std::string fig4_svg(const std::vector<ReportRow>& rows);

} // namespace rtevo
