#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rtevo/formula.hpp"
#include "rtevo/gen.hpp"
#include "rtevo/model.hpp"
#include "rtevo/sim.hpp"

namespace rtevo {

using KvList = std::vector<std::pair<std::string, std::string>>;

// Comment block stamped at the top of every output file: tool version,
// subcommand, and the full effective configuration. Deliberately contains no
// timestamps so reruns are byte-identical.
std::string provenance_header(const std::string& subcommand, const KvList& kv);

// Message-set CSV: header `id,priority,c,t,d,j`, integer fields, '#' comment
// lines ignored.
MessageSet load_message_set_csv(const std::filesystem::path& path);
void write_message_set_csv(std::ostream& os, const MessageSet& set);
void save_message_set_csv(const std::filesystem::path& path,
                          const MessageSet& set, const std::string& header);

// Scenario CSV: `id,offset,first_jitter,later_jitter`.
Scenario load_scenario_csv(const std::filesystem::path& path,
                           const MessageSet& set, Ticks horizon);
void save_scenario_csv(const std::filesystem::path& path, const MessageSet& set,
                       const Scenario& scenario, const std::string& header);

// Task-graph document: JSON with `tasks` and `edges` arrays.
TaskGraph load_task_graph_json(const std::filesystem::path& path);

void save_manifest(const std::filesystem::path& path, const CorpusManifest& m,
                   const std::string& header);
CorpusManifest load_manifest(const std::filesystem::path& path);

// Loads every set listed by dir/manifest.json (falls back to *.csv in name
// order when no manifest is present).
Corpus load_corpus(const std::filesystem::path& dir);

// Formula files: one S-expression per line, ';' comments.
std::vector<Formula> load_formula_file(const std::filesystem::path& path);
void save_formula_file(const std::filesystem::path& path,
                       const std::vector<Formula>& formulas,
                       const std::vector<std::string>& comments);

// Flat key=value run-config file; '#' comments allowed.
std::map<std::string, std::string> load_kv_config(const std::filesystem::path& path);

} // namespace rtevo
