#include "rtevo/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace rtevo {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(trim(cur));
    return fields;
}

std::int64_t parse_int(const std::string& s, const std::string& where) {
    try {
        std::size_t used = 0;
        std::int64_t v = std::stoll(s, &used);
        if (used != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error(Errc::io_error, "bad integer '" + s + "' in " + where);
    }
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::io_error, "cannot open " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw Error(Errc::io_error, "cannot write " + path.string());
    return out;
}

} // namespace

std::string provenance_header(const std::string& subcommand, const KvList& kv) {
    std::ostringstream os;
    os << "# rtevo " << RTEVO_VERSION << "\n";
    os << "# subcommand=" << subcommand << "\n";
    for (const auto& [k, v] : kv)
        os << "# " << k << "=" << v << "\n";
    return os.str();
}

MessageSet load_message_set_csv(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string line;
    bool header_seen = false;
    std::vector<Message> raw;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        if (!header_seen) {
            if (t != "id,priority,c,t,d,j")
                throw Error(Errc::io_error,
                            "expected header 'id,priority,c,t,d,j' in " +
                                path.string());
            header_seen = true;
            continue;
        }
        auto f = split_csv(t);
        if (f.size() != 6)
            throw Error(Errc::io_error, "expected 6 fields in " + path.string() +
                                            ": '" + t + "'");
        Message m;
        m.id = f[0];
        m.priority = static_cast<int>(parse_int(f[1], path.string()));
        m.c = parse_int(f[2], path.string());
        m.t = parse_int(f[3], path.string());
        m.d = parse_int(f[4], path.string());
        m.j = parse_int(f[5], path.string());
        raw.push_back(std::move(m));
    }
    if (!header_seen)
        throw Error(Errc::io_error, "no header in " + path.string());
    return MessageSet::validate(std::move(raw));
}

void write_message_set_csv(std::ostream& os, const MessageSet& set) {
    os << "id,priority,c,t,d,j\n";
    for (const Message& m : set.messages())
        os << m.id << ',' << m.priority << ',' << m.c << ',' << m.t << ','
           << m.d << ',' << m.j << '\n';
}

void save_message_set_csv(const std::filesystem::path& path,
                          const MessageSet& set, const std::string& header) {
    std::ofstream out = open_out(path);
    out << header;
    write_message_set_csv(out, set);
}

Scenario load_scenario_csv(const std::filesystem::path& path,
                           const MessageSet& set, Ticks horizon) {
    std::ifstream in = open_in(path);
    Scenario s;
    s.horizon = horizon;
    s.entries.resize(set.size());
    std::vector<bool> seen(set.size(), false);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        if (!header_seen) {
            if (t != "id,offset,first_jitter,later_jitter")
                throw Error(Errc::io_error,
                            "expected header 'id,offset,first_jitter,later_jitter' in " +
                                path.string());
            header_seen = true;
            continue;
        }
        auto f = split_csv(t);
        if (f.size() != 4)
            throw Error(Errc::io_error, "expected 4 fields in " + path.string());
        std::size_t idx;
        try {
            idx = set.index_of(f[0]);
        } catch (const Error&) {
            throw Error(Errc::io_error,
                        "scenario names unknown message '" + f[0] + "'");
        }
        s.entries[idx].offset = parse_int(f[1], path.string());
        s.entries[idx].first_jitter = parse_int(f[2], path.string());
        s.entries[idx].later_jitter = parse_int(f[3], path.string());
        seen[idx] = true;
    }
    if (!header_seen)
        throw Error(Errc::io_error, "no header in " + path.string());
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i])
            throw Error(Errc::io_error, "scenario misses message '" +
                                            set.at(i).id + "'");
    }
    return s;
}

void save_scenario_csv(const std::filesystem::path& path, const MessageSet& set,
                       const Scenario& scenario, const std::string& header) {
    std::ofstream out = open_out(path);
    out << header << "id,offset,first_jitter,later_jitter\n";
    for (std::size_t i = 0; i < set.size(); ++i) {
        const auto& e = scenario.entries[i];
        out << set.at(i).id << ',' << e.offset << ',' << e.first_jitter << ','
            << e.later_jitter << '\n';
    }
}

TaskGraph load_task_graph_json(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::io_error, path.string() + ": " + e.what());
    }
    try {
        std::vector<Task> tasks;
        for (const auto& jt : doc.at("tasks")) {
            Task t;
            t.id = jt.at("id").get<std::string>();
            t.wcet = jt.at("wcet").get<Ticks>();
            t.t = jt.at("t").get<Ticks>();
            t.d = jt.at("d").get<Ticks>();
            t.priority = jt.at("priority").get<int>();
            tasks.push_back(std::move(t));
        }
        std::vector<Edge> edges;
        for (const auto& je : doc.value("edges", nlohmann::json::array())) {
            Edge e;
            e.src = je.at("src").get<std::string>();
            e.dst = je.at("dst").get<std::string>();
            const auto& jf = je.at("frame");
            e.frame.id = jf.at("id").get<std::string>();
            e.frame.priority = jf.at("priority").get<int>();
            e.frame.c = jf.at("c").get<Ticks>();
            e.frame.t = jf.at("t").get<Ticks>();
            e.frame.d = jf.at("d").get<Ticks>();
            e.frame.j = jf.value("j", Ticks{0});
            edges.push_back(std::move(e));
        }
        return TaskGraph::validate(std::move(tasks), std::move(edges));
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::io_error, path.string() + ": " + e.what());
    }
}

namespace {

nlohmann::json params_to_json(const GenParams& p) {
    return {
        {"n_sets", p.n_sets},
        {"msgs_per_set", p.msgs_per_set},
        {"total_msgs", p.total_msgs},
        {"target_util", p.target_util},
        {"t_min", p.t_min},
        {"t_max", p.t_max},
        {"deadline_factor", p.deadline_factor},
        {"jitter_factor", p.jitter_factor},
        {"seed", p.seed},
    };
}

GenParams params_from_json(const nlohmann::json& j) {
    GenParams p;
    p.n_sets = j.at("n_sets").get<int>();
    p.msgs_per_set = j.at("msgs_per_set").get<int>();
    p.total_msgs = j.at("total_msgs").get<int>();
    p.target_util = j.at("target_util").get<double>();
    p.t_min = j.at("t_min").get<Ticks>();
    p.t_max = j.at("t_max").get<Ticks>();
    p.deadline_factor = j.at("deadline_factor").get<double>();
    p.jitter_factor = j.at("jitter_factor").get<double>();
    p.seed = j.at("seed").get<std::uint64_t>();
    return p;
}

} // namespace

void save_manifest(const std::filesystem::path& path, const CorpusManifest& m,
                   const std::string& header) {
    nlohmann::json doc;
    doc["params"] = params_to_json(m.params);
    doc["sets"] = nlohmann::json::array();
    for (const auto& s : m.sets)
        doc["sets"].push_back({{"file", s.file},
                               {"messages", s.messages},
                               {"utilization", s.utilization}});
    std::ofstream out = open_out(path);
    // JSON has no comments; provenance rides in a top-level field instead.
    doc["provenance"] = header;
    out << doc.dump(2) << '\n';
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    nlohmann::json doc;
    try {
        in >> doc;
        CorpusManifest m;
        m.params = params_from_json(doc.at("params"));
        for (const auto& js : doc.at("sets")) {
            CorpusManifest::SetEntry e;
            e.file = js.at("file").get<std::string>();
            e.messages = js.at("messages").get<int>();
            e.utilization = js.at("utilization").get<double>();
            m.sets.push_back(std::move(e));
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::io_error, path.string() + ": " + e.what());
    }
}

Corpus load_corpus(const std::filesystem::path& dir) {
    Corpus corpus;
    const auto manifest_path = dir / "manifest.json";
    if (std::filesystem::exists(manifest_path)) {
        CorpusManifest m = load_manifest(manifest_path);
        for (const auto& s : m.sets)
            corpus.sets.push_back(load_message_set_csv(dir / s.file));
        return corpus;
    }
    std::vector<std::filesystem::path> files;
    if (!std::filesystem::is_directory(dir))
        throw Error(Errc::io_error, dir.string() + " is not a directory");
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() == ".csv")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files)
        corpus.sets.push_back(load_message_set_csv(f));
    return corpus;
}

std::vector<Formula> load_formula_file(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::vector<Formula> out;
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == ';')
            continue;
        out.push_back(parse_formula(t));
    }
    return out;
}

void save_formula_file(const std::filesystem::path& path,
                       const std::vector<Formula>& formulas,
                       const std::vector<std::string>& comments) {
    std::ofstream out = open_out(path);
    for (const std::string& c : comments)
        out << "; " << c << '\n';
    for (const Formula& f : formulas)
        out << render_formula(f) << '\n';
}

std::map<std::string, std::string> load_kv_config(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw Error(Errc::io_error, path.string() + ":" +
                                            std::to_string(lineno) +
                                            ": expected key=value");
        kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return kv;
}

} // namespace rtevo
