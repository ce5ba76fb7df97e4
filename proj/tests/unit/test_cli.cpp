#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "radar/cli.hpp"
#include "radar/config.hpp"
#include "radar/error.hpp"
#include "radar/format.hpp"

using namespace radar;
namespace fs = std::filesystem;

namespace {

const std::string kCorpus = std::string(RADAR_DATA) + "/synthetic_30.jsonl";

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() / ("radar_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& name = "") const { return (path / name).string(); }
};

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string& path) {
    std::ifstream in(path);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}

} // namespace

TEST_CASE("unknown subcommand exits 2 with usage") {
    const auto r = run({"frobnicate"});
    CHECK(r.code == cli::kExitUsage);
    CHECK(r.err.find("Usage") != std::string::npos);
    CHECK(run({}).code == cli::kExitUsage);
    CHECK(std::system((std::string(RADAR_CLI) + " frobnicate >/dev/null 2>&1").c_str()) != 0);
}

TEST_CASE("usage and stage errors") {
    TempDir dir;
    CHECK(run({"label", "--out", dir.str()}).code == cli::kExitUsage); // no corpus
    CHECK(run({"label", "--corpus", kCorpus, "--label", "bogus", "--out", dir.str()}).code == cli::kExitUsage);
    CHECK(run({"label", "--corpus", dir.str("missing.jsonl"), "--out", dir.str()}).code == cli::kExitStageError);
}

TEST_CASE("config resolution: flags over file over defaults") {
    TempDir dir;
    write_file_atomic(dir.str("cfg.json"), R"({"label":"revised","n_trees":7,"seeds":[4,5]})");
    write_file_atomic(dir.str("cfg.txt"), "# comment\nlabel = commented\nsmote_k = 3\n");
    auto c = load_config_file(dir.str("cfg.json"));
    CHECK(c.label == Label::revised);
    CHECK(c.hyper.n_trees == 7);
    CHECK(c.seeds == std::vector<std::uint64_t>{4, 5});
    CHECK(c.context_limit == 10);
    c = load_config_file(dir.str("cfg.txt"));
    CHECK(c.label == Label::commented);
    CHECK(c.hyper.smote_k == 3);
    write_file_atomic(dir.str("bad.json"), R"({"no_such_key":1})");
    CHECK_THROWS_AS(load_config_file(dir.str("bad.json")), InvalidArgument);

    const auto r = run({"label", "--config", dir.str("cfg.json"), "--label", "hot_spot", "--corpus", kCorpus, "--out",
                        dir.str("o")});
    REQUIRE(r.code == 0);
    const auto cfg = nlohmann::json::parse(read_file(dir.str("o/config.json")));
    CHECK(cfg["label"] == "hot_spot");
    CHECK(cfg["n_trees"] == 7);
    CHECK(cfg["_meta"]["config_hash"].get<std::string>().size() == 16);
}

TEST_CASE("environment config fallback") {
    TempDir dir;
    write_file_atomic(dir.str("env.json"), R"({"comments_scope":"initial"})");
    ::setenv(kConfigEnvVar, dir.str("env.json").c_str(), 1);
    const auto r = run({"label", "--corpus", kCorpus, "--out", dir.str("o")});
    ::unsetenv(kConfigEnvVar);
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(read_file(dir.str("o/config.json")))["comments_scope"] == "initial");
}

TEST_CASE("stage outputs") {
    TempDir dir;
    const auto out = dir.str();
    REQUIRE(run({"ingest", "--corpus", kCorpus, "--out", out}).code == 0);
    CHECK(count_lines(dir.str("corpus.jsonl")) == 31);

    REQUIRE(run({"label", "--corpus", dir.str("corpus.jsonl"), "--out", out}).code == 0);
    std::ifstream labels(dir.str("labels.jsonl"));
    std::string meta, first;
    std::getline(labels, meta);
    std::getline(labels, first);
    CHECK(nlohmann::json::parse(meta)["_meta"]["tool"] == "review-radar");
    const auto row = nlohmann::json::parse(first);
    CHECK(row.contains("patch_id"));
    CHECK(row.contains("hot_spot"));

    REQUIRE(run({"featurize", "--corpus", kCorpus, "--out", out}).code == 0);
    std::ifstream features(dir.str("features.csv"));
    std::string provenance, header;
    std::getline(features, provenance);
    std::getline(features, header);
    CHECK(provenance.rfind("# review-radar", 0) == 0);
    CHECK(std::count(header.begin(), header.end(), ',') == 38);

    REQUIRE(run({"embed", "--corpus", kCorpus, "--spec", "bow+all", "--out", out}).code == 0);
    CHECK(fs::exists(dir.str("embedding.json")));
    CHECK(fs::exists(dir.str("vocab_add.json")));
    CHECK(fs::exists(dir.str("vocab_rem.json")));
}

TEST_CASE("evaluate writes twenty reports") {
    TempDir dir;
    const auto r = run({"evaluate", "--corpus", kCorpus, "--spec", "bow+all", "--label", "hot_spot", "--scheme",
                        "ratio", "--n-trees", "20", "--out", dir.str()});
    REQUIRE(r.code == 0);
    CHECK(count_lines(dir.str("reports.jsonl")) == 21);
    CHECK(count_lines(dir.str("reports.csv")) == 22);
    CHECK(fs::exists(dir.str("selection.json")));
}

TEST_CASE("train, order, report and compare") {
    TempDir dir;
    REQUIRE(run({"train", "--corpus", kCorpus, "--spec", "count", "--variant", "rf", "--n-trees", "20", "--out",
                 dir.str("m")})
                .code == 0);
    const auto model = dir.str("m/model.json");
    REQUIRE(run({"order", "--corpus", kCorpus, "--model", model, "--slice", "all", "--out", dir.str("o")}).code == 0);
    CHECK(fs::exists(dir.str("o/ordering.jsonl")));
    CHECK(count_lines(dir.str("o/ordering_report.csv")) == 5);
    REQUIRE(run({"report", "--corpus", kCorpus, "--model", model, "--out", dir.str("r")}).code == 0);
    CHECK(fs::exists(dir.str("r/summary.json")));
    CHECK(count_lines(dir.str("r/importance.csv")) == 2 + 9);

    for (const auto* spec : {"count", "add_rem"}) {
        REQUIRE(run({"evaluate", "--corpus", kCorpus, "--spec", spec, "--n-trees", "10", "--out",
                     dir.str(std::string("e_") + spec)})
                    .code == 0);
    }
    const auto c = run({"compare", "--a", dir.str("e_count/reports.jsonl"), "--b", dir.str("e_add_rem/reports.jsonl"),
                        "--metric", "f1", "--out", dir.str("c")});
    REQUIRE(c.code == 0);
    const auto csv = read_file(dir.str("c/compare.csv"));
    CHECK(csv.find("setupA,setupB,grouping") != std::string::npos);
    CHECK(csv.find("none+add_and_remove+count,none+add_and_remove+add_rem,all,hot_spot,f1,5,") != std::string::npos);
}
