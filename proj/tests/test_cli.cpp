#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rtevo/cli.hpp"

namespace fs = std::filesystem;

namespace {

int cli(std::initializer_list<std::string> args) {
    return rtevo::run_cli(std::vector<std::string>(args));
}

// Non-comment lines only: provenance headers legitimately differ in the
// echoed config (e.g. threads).
std::string payload(const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#')
            continue;
        out += line;
        out += '\n';
    }
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name)
        : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& leaf) const {
        return (path / leaf).string();
    }
};

} // namespace

TEST_CASE("usage errors exit with 1") {
    CHECK(cli({}) == 1);
    CHECK(cli({"no-such-command"}) == 1);
    CHECK(cli({"analyze"}) == 1); // --in required
}

TEST_CASE("missing input files exit with 2") {
    CHECK(cli({"analyze", "--in", "/nonexistent/set.csv"}) == 2);
    CHECK(cli({"simulate", "--in", "/nonexistent/set.csv"}) == 2);
    CHECK(cli({"evolve-test", "--corpus", "/nonexistent/dir"}) == 2);
}

TEST_CASE("malformed inputs exit with 2") {
    TempDir dir("rtevo_cli_malformed");
    {
        std::ofstream out(dir / "bad.csv");
        out << "id,priority,c\n";
    }
    CHECK(cli({"analyze", "--in", dir / "bad.csv"}) == 2);
    {
        std::ofstream out(dir / "bad2.csv");
        out << "id,priority,c,t,d,j\nm1,1,x,4,4,0\n";
    }
    CHECK(cli({"analyze", "--in", dir / "bad2.csv"}) == 2);
}

TEST_CASE("gen-corpus then analyze round-trips deterministically") {
    TempDir dir("rtevo_cli_flow");
    CHECK(cli({"gen-corpus", "--sets", "2", "--msgs", "6", "--util", "0.5",
               "--seed", "5", "--out", dir / "corpus"}) == 0);
    CHECK(cli({"analyze", "--in", dir / "corpus/set_000.csv", "--out",
               dir / "report.csv"}) == 0);
    std::string first = slurp(dir / "report.csv");
    CHECK(first.find("id,test,verdict,r,iterations") != std::string::npos);
    CHECK(cli({"analyze", "--in", dir / "corpus/set_000.csv", "--out",
               dir / "report.csv"}) == 0);
    CHECK(slurp(dir / "report.csv") == first);
}

TEST_CASE("simulate writes watermarks and a trace") {
    TempDir dir("rtevo_cli_sim");
    {
        std::ofstream out(dir / "set.csv");
        out << "id,priority,c,t,d,j\nm1,1,1,4,4,0\nm2,2,2,10,10,0\n";
    }
    CHECK(cli({"simulate", "--in", dir / "set.csv", "--out", dir / "wm.csv",
               "--trace", dir / "trace.csv"}) == 0);
    std::string wm = slurp(dir / "wm.csv");
    CHECK(wm.find("m1,1,") != std::string::npos);
    CHECK(wm.find("m2,3,") != std::string::npos);
    CHECK(wm.find("# first_miss=none") != std::string::npos);
    CHECK(slurp(dir / "trace.csv").find("id,instance,nominal,start,completion") !=
          std::string::npos);
}

TEST_CASE("evolve-test then report reproduce byte-identical outputs") {
    TempDir dir("rtevo_cli_evolve");
    REQUIRE(cli({"gen-corpus", "--sets", "3", "--msgs", "8", "--util", "0.5",
                 "--seed", "13", "--out", dir / "corpus"}) == 0);
    auto run = [&](const std::string& tag) {
        REQUIRE(cli({"evolve-test", "--corpus", dir / "corpus", "--population",
                     "20", "--generations", "5", "--seed", "3", "--out",
                     dir / (tag + ".sexp"), "--log", dir / (tag + ".csv")}) == 0);
    };
    run("a");
    run("b");
    CHECK(slurp(dir / "a.sexp") == slurp(dir / "b.sexp"));
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));

    // serial vs parallel: payloads identical (headers echo the thread count)
    REQUIRE(cli({"evolve-test", "--corpus", dir / "corpus", "--population",
                 "20", "--generations", "5", "--seed", "3", "--threads", "4",
                 "--out", dir / "p.sexp", "--log", dir / "p.csv"}) == 0);
    CHECK(payload(slurp(dir / "p.csv")) == payload(slurp(dir / "a.csv")));
    CHECK(slurp(dir / "p.sexp") == slurp(dir / "a.sexp"));

    REQUIRE(cli({"report", "--baselines", dir / "corpus", "--history",
                 dir / "a.csv", "--svg", dir / "fig4.svg", "--csv",
                 dir / "fig4.csv"}) == 0);
    std::string fig = slurp(dir / "fig4.csv");
    CHECK(fig.find("eq1,") != std::string::npos);
    CHECK(fig.find("eq4,") != std::string::npos);
    CHECK(fig.find("evolved,") != std::string::npos);
    CHECK(slurp(dir / "fig4.svg").find("<svg") != std::string::npos);

    REQUIRE(cli({"report", "--baselines", dir / "corpus", "--history",
                 dir / "a.csv", "--svg", dir / "fig4b.svg", "--csv",
                 dir / "fig4b.csv"}) == 0);
    CHECK(slurp(dir / "fig4b.csv") == fig);
}

TEST_CASE("horizon beyond the cap is a runtime failure") {
    TempDir dir("rtevo_cli_horizon");
    {
        std::ofstream out(dir / "set.csv");
        out << "id,priority,c,t,d,j\nm1,1,1,4,4,0\n";
    }
    CHECK(cli({"simulate", "--in", dir / "set.csv", "--horizon",
               "20000000"}) == 3);
}

TEST_CASE("simulate accepts a scenario file") {
    TempDir dir("rtevo_cli_scenfile");
    {
        std::ofstream out(dir / "set.csv");
        out << "id,priority,c,t,d,j\nm1,1,1,4,4,2\nm2,2,2,10,10,0\n";
    }
    {
        std::ofstream out(dir / "scen.csv");
        out << "id,offset,first_jitter,later_jitter\nm1,1,2,0\nm2,0,0,0\n";
    }
    REQUIRE(cli({"simulate", "--in", dir / "set.csv", "--scenario",
                 dir / "scen.csv", "--horizon", "100", "--out",
                 dir / "wm.csv"}) == 0);
    std::string wm = slurp(dir / "wm.csv");
    CHECK(wm.find("# horizon=100") != std::string::npos);
    // m2 starts at 0 and blocks m1 (released 1+2=3, nominal 1): m1 completes
    // at 4 hmm -> computed by the simulator; just require both rows present.
    CHECK(wm.find("m1,") != std::string::npos);
    CHECK(wm.find("m2,") != std::string::npos);

    // scenario naming an unknown message is malformed input
    {
        std::ofstream out(dir / "bad.csv");
        out << "id,offset,first_jitter,later_jitter\nzz,0,0,0\n";
    }
    CHECK(cli({"simulate", "--in", dir / "set.csv", "--scenario",
               dir / "bad.csv"}) == 2);
}

TEST_CASE("report reads the evolved best from a formula file") {
    TempDir dir("rtevo_cli_best");
    REQUIRE(cli({"gen-corpus", "--sets", "2", "--msgs", "6", "--seed", "21",
                 "--out", dir / "corpus"}) == 0);
    {
        std::ofstream out(dir / "best.sexp");
        out << "; fitness=0\n(rt (+ (+ Ji Ci) Bi) (isum (+ Ri Jk) 1))\n";
    }
    REQUIRE(cli({"report", "--baselines", dir / "corpus", "--best",
                 dir / "best.sexp", "--csv", dir / "fig.csv"}) == 0);
    std::string fig = slurp(dir / "fig.csv");
    CHECK(fig.find("evolved,(rt (+ (+ Ji Ci) Bi) (isum (+ Ri Jk) 1))") !=
          std::string::npos);
}

TEST_CASE("config files feed defaults and reject unknown keys") {
    TempDir dir("rtevo_cli_cfg");
    REQUIRE(cli({"gen-corpus", "--sets", "1", "--msgs", "5", "--seed", "2",
                 "--out", dir / "corpus"}) == 0);
    {
        std::ofstream out(dir / "run.cfg");
        out << "# tiny run\npopulation=10\ngenerations=2\nseed=9\n";
    }
    REQUIRE(cli({"evolve-test", "--corpus", dir / "corpus", "--config",
                 dir / "run.cfg", "--log", dir / "h.csv"}) == 0);
    std::string hist = slurp(dir / "h.csv");
    CHECK(hist.find("# population=10") != std::string::npos);
    CHECK(hist.find("# seed=9") != std::string::npos);
    // flag overrides file
    REQUIRE(cli({"evolve-test", "--corpus", dir / "corpus", "--config",
                 dir / "run.cfg", "--seed", "4", "--log", dir / "h2.csv"}) == 0);
    CHECK(slurp(dir / "h2.csv").find("# seed=4") != std::string::npos);

    {
        std::ofstream out(dir / "bad.cfg");
        out << "populaton=10\n";
    }
    CHECK(cli({"evolve-test", "--corpus", dir / "corpus", "--config",
               dir / "bad.cfg"}) == 2);
}

TEST_CASE("allocate runs end to end") {
    TempDir dir("rtevo_cli_alloc");
    {
        std::ofstream out(dir / "graph.json");
        out << R"({"tasks":[
            {"id":"t1","wcet":2,"t":100,"d":100,"priority":1},
            {"id":"t2","wcet":3,"t":120,"d":120,"priority":2}],
            "edges":[{"src":"t1","dst":"t2",
                      "frame":{"id":"f1","priority":1,"c":2,"t":100,"d":100,"j":0}}]})";
    }
    REQUIRE(cli({"allocate", "--tasks", dir / "graph.json", "--nodes", "2",
                 "--fitness", "count", "--population", "10", "--generations",
                 "4", "--seed", "6", "--out", dir / "alloc.csv", "--log",
                 dir / "ah.csv"}) == 0);
    std::string alloc = slurp(dir / "alloc.csv");
    CHECK(alloc.find("task_id,node") != std::string::npos);
    CHECK(alloc.find("t1,") != std::string::npos);

    REQUIRE(cli({"allocate", "--tasks", dir / "graph.json", "--nodes", "2",
                 "--fitness", "breakdown", "--population", "8", "--generations",
                 "3", "--seed", "6", "--out", dir / "alloc2.csv"}) == 0);
}

TEST_CASE("coevolve emits tests, history, and a hardest scenario") {
    TempDir dir("rtevo_cli_coevo");
    {
        std::ofstream out(dir / "params.cfg");
        out << "sets=2\nmsgs=6\nutil=0.9\nseed=19\n";
    }
    REQUIRE(cli({"coevolve", "--corpus-params", dir / "params.cfg", "--rounds",
                 "1", "--test-epochs", "1", "--scenario-epochs", "1",
                 "--population", "12", "--scenario-population", "8",
                 "--generations", "1", "--out", dir / "tests.sexp", "--log",
                 dir / "th.csv", "--scenario-log", dir / "sh.csv", "--hardest",
                 dir / "hard.csv"}) == 0);
    CHECK(slurp(dir / "tests.sexp").find("(rt ") != std::string::npos);
    CHECK(slurp(dir / "sh.csv").find("generation,best_refutations") !=
          std::string::npos);
    // determinism
    REQUIRE(cli({"coevolve", "--corpus-params", dir / "params.cfg", "--rounds",
                 "1", "--test-epochs", "1", "--scenario-epochs", "1",
                 "--population", "12", "--scenario-population", "8",
                 "--generations", "1", "--out", dir / "tests2.sexp", "--log",
                 dir / "th2.csv"}) == 0);
    CHECK(slurp(dir / "tests2.sexp") == slurp(dir / "tests.sexp"));
    CHECK(slurp(dir / "th2.csv") == slurp(dir / "th.csv"));
}
