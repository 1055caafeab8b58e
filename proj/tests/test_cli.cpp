// Drives the installed CLI binary end to end through std::system.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

using json = nlohmann::json;

namespace {

const std::string cli = SFS_CLI_PATH;

int run_cmd(const std::string& args) {
    const std::string cmd = cli + " " + args + " >/dev/null 2>cli_stderr.txt";
    return std::system(cmd.c_str());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

size_t line_count(const std::string& text) {
    size_t n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

struct Cleanup {
    std::vector<std::string> files;
    ~Cleanup() {
        for (const auto& f : files) std::remove(f.c_str());
    }
};

// strip wall-clock fields before comparing reports
json comparable(json j) {
    j.erase("timing");
    for (auto& f : j["folds"]) f.erase("seconds");
    return j;
}

}  // namespace

TEST_CASE("cli: generate writes the expected CSV shape") {
    Cleanup c{{"cli_rings.csv", "cli_stderr.txt"}};
    REQUIRE(run_cmd("generate -o cli_rings.csv") == 0);
    const std::string text = read_file("cli_rings.csv");
    CHECK(line_count(text) == 601);  // header + 600 rows
    const std::string header = text.substr(0, text.find('\n'));
    size_t commas = 0;
    for (char ch : header)
        if (ch == ',') ++commas;
    CHECK(commas == 10);  // 11 columns
    CHECK(header.find("label") != std::string::npos);
}

TEST_CASE("cli: generate is deterministic in the seed") {
    Cleanup c{{"a.csv", "b.csv", "cli_stderr.txt"}};
    REQUIRE(run_cmd("generate --noise-variance 25 --seed 5 -o a.csv") == 0);
    REQUIRE(run_cmd("generate --noise-variance 25 --seed 5 -o b.csv") == 0);
    CHECK(read_file("a.csv") == read_file("b.csv"));
}

TEST_CASE("cli: run produces the report schema and round-trips its config") {
    Cleanup c{{"rep.json", "rep2.json", "cli_stderr.txt"}};
    const std::string flags =
        "run --synthetic --samples 20 --features 5 --data-seed 4 --seed 4 "
        "--folds 3 --inner-folds 2 --ell-grid 1,2 -o rep.json";
    REQUIRE(run_cmd(flags) == 0);
    json rep = json::parse(read_file("rep.json"));
    for (const char* key : {"oa_mean", "oa_std", "aa_mean", "aa_std", "nmi_mean", "nmi_std",
                            "folds", "config_echo", "seed"})
        CHECK(rep.contains(key));
    CHECK(rep["folds"].size() == 3);
    CHECK(rep["config_echo"]["integration"] == "rms");

    // re-running from the echoed config reproduces the results bit-identically
    REQUIRE(run_cmd("run --config rep.json -o rep2.json") == 0);
    json rep2 = json::parse(read_file("rep2.json"));
    CHECK(comparable(rep) == comparable(rep2));
}

TEST_CASE("cli: integration flag changes only the reported method and results") {
    Cleanup c{{"r1.json", "r2.json", "cli_stderr.txt"}};
    const std::string base =
        "run --synthetic --samples 20 --features 5 --data-seed 4 --seed 4 "
        "--folds 3 --inner-folds 2 --ell-grid 1,2 ";
    REQUIRE(run_cmd(base + "--integration rms -o r1.json") == 0);
    REQUIRE(run_cmd(base + "--integration arithmetic -o r2.json") == 0);
    json r1 = json::parse(read_file("r1.json"));
    json r2 = json::parse(read_file("r2.json"));
    CHECK(r1["config_echo"]["integration"] == "rms");
    CHECK(r2["config_echo"]["integration"] == "arithmetic");
    json c1 = r1["config_echo"], c2 = r2["config_echo"];
    c1.erase("integration");
    c2.erase("integration");
    CHECK(c1 == c2);
}

TEST_CASE("cli: scale emits per-split candidates and integrated factors") {
    Cleanup c{{"fac.json", "cli_stderr.txt"}};
    REQUIRE(run_cmd("scale --synthetic --samples 30 --features 6 --data-seed 2 -o fac.json") == 0);
    json fac = json::parse(read_file("fac.json"));
    CHECK(fac["num_splits"] == 3);
    CHECK(fac["integrated"].size() == 6);
    CHECK(fac["candidates"].size() == 6);
    CHECK(fac["splits"].size() == 3);
    for (const auto& s : fac["splits"]) CHECK(s.contains("mu"));
}

TEST_CASE("cli: single-feature dataset, integration is the identity") {
    Cleanup c{{"one.csv", "fac1.json", "cli_stderr.txt"}};
    std::ofstream out("one.csv");
    out << "x,label\n";
    for (int i = 0; i < 12; ++i)
        out << (i % 2 ? 1.0 + 0.1 * i : 3.0 + 0.1 * i) << ',' << (i % 2 ? "a" : "b") << '\n';
    out.close();
    REQUIRE(run_cmd("scale -i one.csv --k-local 2 -o fac1.json") == 0);
    json fac = json::parse(read_file("fac1.json"));
    CHECK(fac["num_splits"] == 1);
    CHECK(fac["integrated"].size() == 1);
    CHECK(std::abs(fac["integrated"][0].get<double>() -
                   fac["candidates"][0][0].get<double>()) <= 1e-12);
}

TEST_CASE("cli: variance sweep writes one row per variance") {
    Cleanup c{{"sweep.csv", "cli_stderr.txt"}};
    const std::string flags =
        "run --synthetic --samples 20 --features 5 --data-seed 4 --seed 4 "
        "--folds 3 --inner-folds 2 --ell-grid 1,2 --variance-sweep 1:3:1 --sweep-output sweep.csv";
    REQUIRE(run_cmd(flags) == 0);
    const std::string text = read_file("sweep.csv");
    CHECK(line_count(text) == 4);  // header + 3 variances
    CHECK(text.rfind("variance,oa_mean,aa_mean,nmi_mean\n", 0) == 0);
}

TEST_CASE("cli: errors surface as one-line stderr messages with exit 1") {
    Cleanup c{{"dup.csv", "cli_stderr.txt"}};
    std::ofstream out("dup.csv");
    out << "x,y,label\n1,2,a\n1,2,a\n1,2,b\n3,4,b\n";
    out.close();
    CHECK(run_cmd("scale -i dup.csv --k-local 1") != 0);
    const std::string err = read_file("cli_stderr.txt");
    CHECK(err.rfind("error: ", 0) == 0);
    CHECK(line_count(err) == 1);

    CHECK(run_cmd("run -i missing_file.csv") != 0);
    CHECK(read_file("cli_stderr.txt").rfind("error: ", 0) == 0);
}

TEST_CASE("cli: downstream fold-count errors propagate cleanly") {
    Cleanup c{{"tiny.csv", "cli_stderr.txt"}};
    REQUIRE(run_cmd("generate --classes 10 --samples 4 --seed 3 -o tiny.csv") == 0);
    CHECK(run_cmd("run -i tiny.csv --folds 5 --inner-folds 4") != 0);
    const std::string err = read_file("cli_stderr.txt");
    CHECK(err.rfind("error: ", 0) == 0);
    CHECK(err.find("fewer than k") != std::string::npos);
}
