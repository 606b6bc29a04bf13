#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "netgrow/serialize.hpp"

namespace {

const char* cli_path() { return NETGROW_CLI_PATH; }

int run(const std::string& args) {
    std::string cmd = std::string(cli_path()) + " " + args + " 2>/dev/null";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("netgrow_cli_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate writes deterministic records with the ring floor") {
    TempFile out("sim.jsonl");
    int code = run("simulate --model connected_small_world --n 50 --count 10 --seed 7 --out " +
                   out.path);
    CHECK(code == 0);
    std::string first = slurp(out.path);
    std::ifstream in(out.path);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        ++lines;
        netgrow::GraphRecord rec = netgrow::parse_graph_record(line, lines);
        CHECK(rec.graph.num_edges() >= 100);  // nz/2 ring edges at minimum
        CHECK(rec.theta.size() == 1);
    }
    CHECK(lines == 10);

    CHECK(run("simulate --model connected_small_world --n 50 --count 10 --seed 7 --out " +
              out.path) == 0);
    CHECK(slurp(out.path) == first);
}

TEST_CASE("unknown model exits with the usage code") {
    CHECK(run("simulate --model nosuch --n 10 --count 1 --out /dev/null") == 2);
}

TEST_CASE("missing dataset file exits with the io code") {
    TempFile ckpt("nope.ckpt");
    CHECK(run("train --model redirection --train does_not_exist.jsonl --val also_missing.jsonl "
              "--out " + ckpt.path) == 1);
}

TEST_CASE("oracle posterior for a random-connection graph") {
    TempFile graph("oracle_in.jsonl");
    {
        std::ofstream out(graph.path);
        out << R"({"n":5,"edges":[[0,1],[2,3]]})" << "\n";
    }
    TempFile posterior("oracle_out.json");
    int code = run("oracle --model random_connection --graph " + graph.path + " --out " +
                   posterior.path);
    CHECK(code == 0);
    CHECK(slurp(posterior.path) == "{\"alpha\":[3],\"beta\":[3]}\n");
}

TEST_CASE("oracle guards map to the usage exit code") {
    TempFile graph("oracle_big.jsonl");
    {
        // 9-node path: too large for the brute-force ordering sum.
        std::ofstream out(graph.path);
        out << R"({"n":9,"edges":[[0,1],[1,2],[2,3],[3,4],[4,5],[5,6],[6,7],[7,8]]})" << "\n";
    }
    CHECK(run("oracle --model redirection_bruteforce --graph " + graph.path) == 2);

    TempFile sparse("oracle_sparse.jsonl");
    {
        std::ofstream out(sparse.path);
        out << R"({"n":10,"edges":[[0,1]]})" << "\n";
    }
    CHECK(run("oracle --model connected_small_world --graph " + sparse.path) == 2);
}

TEST_CASE("train, eval, and the report identity") {
    TempFile train("train.jsonl"), val("val.jsonl"), test("test.jsonl");
    CHECK(run("simulate --model random_connection --n 20 --count 48 --seed 1 --out " +
              train.path) == 0);
    CHECK(run("simulate --model random_connection --n 20 --count 16 --seed 2 --out " + val.path) ==
          0);
    CHECK(run("simulate --model random_connection --n 20 --count 16 --seed 3 --out " + test.path) ==
          0);

    TempFile ckpt("model.ckpt.json"), metrics("metrics.csv"), report("report.json");
    CHECK(run("train --model random_connection --depth 1 --total-depth 2 --restarts 1 "
              "--max-epochs 2 --train " + train.path + " --val " + val.path + " --out " +
              ckpt.path + " --metrics " + metrics.path) == 0);
    CHECK(slurp(metrics.path).rfind("epoch,", 0) == 0);

    CHECK(run("eval --checkpoint " + ckpt.path + " --test " + test.path +
              " --bootstrap 100 --out " + report.path) == 0);
    nlohmann::json j = nlohmann::json::parse(slurp(report.path));
    CHECK(std::fabs(j["mi"].get<double>() -
                    (j["prior_entropy"].get<double>() - j["test_nll"].get<double>())) < 1e-12);
    CHECK(j["ci_lo"].is_number());

    // bootstrap 0 leaves the CI fields null
    TempFile report2("report2.json");
    CHECK(run("eval --checkpoint " + ckpt.path + " --test " + test.path + " --bootstrap 0 --out " +
              report2.path) == 0);
    nlohmann::json j2 = nlohmann::json::parse(slurp(report2.path));
    CHECK(j2["ci_lo"].is_null());

    // model mismatch: evaluate against a two-parameter dataset
    TempFile wrong("wrong.jsonl");
    CHECK(run("simulate --model duplication_mutation --n 20 --count 8 --seed 4 --out " +
              wrong.path) == 0);
    CHECK(run("eval --checkpoint " + ckpt.path + " --test " + wrong.path) == 2);
}

TEST_CASE("sweep emits one row per depth and resumes") {
    TempFile csv("sweep.csv");
    std::string flags = "sweep --model random_connection --depths 0:1 --n 16 --train-count 32 "
                        "--val-count 8 --test-count 8 --restarts 1 --max-epochs 2 "
                        "--total-depth 2 --bootstrap 50 --seed 9 --out " + csv.path;
    CHECK(run(flags) == 0);
    std::string first = slurp(csv.path);
    int rows = -1;  // discount header
    for (char c : first) rows += c == '\n';
    CHECK(rows == 2);
    CHECK(run(flags) == 0);
    CHECK(slurp(csv.path) == first);
}

TEST_CASE("config file supplies defaults that flags override") {
    TempFile cfg("config.json"), out("sim_cfg.jsonl");
    {
        std::ofstream c(cfg.path);
        c << R"({"model":"random_connection","n":12,"count":3,"seed":5})" << "\n";
    }
    CHECK(run("simulate --config " + cfg.path + " --out " + out.path) == 0);
    std::ifstream in(out.path);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        netgrow::GraphRecord rec = netgrow::parse_graph_record(line, ++lines);
        CHECK(rec.graph.num_nodes() == 12);
    }
    CHECK(lines == 3);

    // flag overrides the file
    CHECK(run("simulate --config " + cfg.path + " --count 1 --out " + out.path) == 0);
    std::string text = slurp(out.path);
    int count = 0;
    for (char c : text) count += c == '\n';
    CHECK(count == 1);
}

}  // TEST_SUITE
