#include "rtevo/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace rtevo {

namespace {

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

} // namespace

std::vector<ReportRow> build_report(
    const Corpus& corpus,
    const std::vector<std::pair<std::string, Formula>>& formulas,
    const FitnessConfig& fc, const AnalysisConfig& cfg) {
    fc.check();
    cfg.check();
    PreparedCorpus prep = PreparedCorpus::prepare(corpus);
    OracleTable oracle = OracleTable::compute(corpus, fc.oracle, cfg);
    const std::int64_t base =
        std::max<std::int64_t>(
            score_formula(builtin(1), prep, oracle, fc, cfg).fitness, 1);

    std::vector<ReportRow> rows;
    for (const auto& [name, f] : formulas) {
        FormulaScore score = score_formula(f, prep, oracle, fc, cfg);
        ReportRow row;
        row.name = name;
        row.formula = render_formula(f);
        row.fitness = score.fitness;
        row.normalized =
            static_cast<double>(score.fitness) / static_cast<double>(base);
        row.optimistic = score.optimistic;
        row.divergent = score.divergent;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string fig4_svg(const std::vector<ReportRow>& rows) {
    const int width = 640;
    const int height = 400;
    const int margin_left = 70;
    const int margin_bottom = 50;
    const int margin_top = 30;
    const int plot_w = width - margin_left - 30;
    const int plot_h = height - margin_top - margin_bottom;

    double max_norm = 1.0;
    for (const ReportRow& r : rows)
        max_norm = std::max(max_norm, r.normalized);

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
       << "\" height=\"" << height << "\">\n";
    os << "<rect width=\"" << width << "\" height=\"" << height
       << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2
       << "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"14\">Normalised fitness (lower is better)</text>\n";
    os << "<line x1=\"" << margin_left << "\" y1=\"" << margin_top << "\" x2=\""
       << margin_left << "\" y2=\"" << margin_top + plot_h
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << margin_left << "\" y1=\"" << margin_top + plot_h
       << "\" x2=\"" << margin_left + plot_w << "\" y2=\""
       << margin_top + plot_h << "\" stroke=\"black\"/>\n";

    if (!rows.empty()) {
        const int slot = plot_w / static_cast<int>(rows.size());
        const int bar_w = std::max(10, slot * 3 / 5);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const double frac = rows[i].normalized / max_norm;
            const int bar_h =
                std::max(1, static_cast<int>(frac * plot_h + 0.5));
            const int x = margin_left + static_cast<int>(i) * slot +
                          (slot - bar_w) / 2;
            const int y = margin_top + plot_h - bar_h;
            os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << bar_w
               << "\" height=\"" << bar_h << "\" fill=\"#4878a8\"/>\n";
            os << "<text x=\"" << x + bar_w / 2 << "\" y=\"" << y - 4
               << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                  "font-size=\"12\">"
               << fmt6(rows[i].normalized) << "</text>\n";
            os << "<text x=\"" << x + bar_w / 2 << "\" y=\""
               << margin_top + plot_h + 18
               << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                  "font-size=\"12\">"
               << rows[i].name << "</text>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace rtevo
