#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <cstdio>
#include <fstream>

#include "netgrow/evaluation.hpp"

using namespace netgrow;

namespace {

Checkpoint make_checkpoint(const std::string& model, int gin_layers, std::uint64_t seed) {
    Checkpoint ckpt;
    ckpt.model = model;
    ckpt.config.gin_layers = gin_layers;
    ckpt.config.param_count = registry(model).param_count;
    RngStream rng(seed);
    ckpt.params = init_nde_params(ckpt.config, rng);
    return ckpt;
}

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("mutual information satisfies the entropy identity") {
    const auto& spec = registry("random_connection");
    Dataset test_set = sample_dataset(spec, 40, 30, 11);
    Checkpoint ckpt = make_checkpoint("random_connection", 1, 3);
    EvalReport report = mutual_information(ckpt, test_set);
    CHECK(std::fabs(report.mi - (report.prior_entropy - report.test_nll)) < 1e-12);
    CHECK(report.per_graph_logp.size() == 40);
    CHECK(report.baseline.has_value());
    CHECK(report.eval_seconds >= 0.0);

    std::string json = report.to_json();
    CHECK(json.find("\"mi\":") != std::string::npos);
    CHECK(json.find("\"ci_lo\":null") != std::string::npos);
}

TEST_CASE("model mismatch is rejected") {
    Dataset test_set = sample_dataset(registry("duplication_mutation"), 5, 20, 1);
    Checkpoint ckpt = make_checkpoint("redirection", 1, 3);
    CHECK_THROWS_AS(mutual_information(ckpt, test_set), std::invalid_argument);
    Dataset empty;
    CHECK_THROWS_AS(mutual_information(ckpt, empty), std::invalid_argument);
}

TEST_CASE("bootstrap of constant observations has zero width") {
    std::vector<double> logp(50, -1.25);
    BootstrapCI ci = bootstrap_ci(logp, 0.5, 500, 9);
    CHECK(ci.lo == ci.hi);
    CHECK(ci.lo == doctest::Approx(0.5 - 1.25));
    CHECK(ci.se == doctest::Approx(0.0));
}

TEST_CASE("bootstrap interval brackets the point estimate") {
    RngStream rng(13);
    std::vector<double> logp;
    for (int i = 0; i < 200; ++i) logp.push_back(-1.0 + 0.3 * rng.normal());
    double mean = 0.0;
    for (double x : logp) mean += x;
    mean /= logp.size();
    BootstrapCI ci = bootstrap_ci(logp, 0.0, 1000, 4);
    CHECK(ci.lo <= mean);
    CHECK(ci.hi >= mean);
    // deterministic given the seed
    BootstrapCI again = bootstrap_ci(logp, 0.0, 1000, 4);
    CHECK(again.lo == ci.lo);
    CHECK(again.hi == ci.hi);
}

TEST_CASE("bootstrap width shrinks like the square root of the sample size") {
    RngStream rng(17);
    auto width_at = [&](int n) {
        double total = 0.0;
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<double> logp;
            for (int i = 0; i < n; ++i) logp.push_back(rng.normal());
            BootstrapCI ci = bootstrap_ci(logp, 0.0, 400, 100 + rep);
            total += ci.hi - ci.lo;
        }
        return total / 20.0;
    };
    double w1 = width_at(250);
    double w2 = width_at(1000);
    CHECK(w1 / w2 == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("bootstrap input validation") {
    CHECK_THROWS_AS(bootstrap_ci({1.0}, 0.0, 100, 1), std::invalid_argument);
    CHECK_THROWS_AS(bootstrap_ci({1.0, 2.0}, 0.0, 1, 1), std::invalid_argument);
}

TEST_CASE("depth sweep writes and resumes rows") {
    TrainConfig cfg;
    cfg.model = "random_connection";
    cfg.nodes = 20;
    cfg.train_count = 32;
    cfg.val_count = 8;
    cfg.test_count = 12;
    cfg.batch_size = 16;
    cfg.restarts = 1;
    cfg.max_epochs = 2;
    cfg.total_layers = 2;
    cfg.seed = 3;

    SweepOptions options;
    options.depths = {0, 1};
    options.bootstrap_resamples = 50;

    std::string csv = "netgrow_test_sweep.csv";
    std::remove(csv.c_str());
    depth_sweep(cfg, options, csv);

    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "model,depth,mi,ci_lo,ci_hi,baseline,receptive_field,test_nll,prior_entropy,"
          "eval_seconds");
    std::vector<std::string> rows;
    std::string line;
    while (std::getline(in, line)) rows.push_back(line);
    CHECK(rows.size() == 2);
    CHECK(rows[0].substr(0, 20) == "random_connection,0,");
    // receptive field column is present for the 0-localized model: 2k+1 = 1
    CHECK(rows[0].find(",1,") != std::string::npos);

    // rerun: rows already present are kept untouched
    std::ifstream before(csv, std::ios::binary);
    std::string first((std::istreambuf_iterator<char>(before)), std::istreambuf_iterator<char>());
    before.close();
    depth_sweep(cfg, options, csv);
    std::ifstream after(csv, std::ios::binary);
    std::string second((std::istreambuf_iterator<char>(after)), std::istreambuf_iterator<char>());
    CHECK(first == second);
    std::remove(csv.c_str());
}

TEST_CASE("timing requires a nonempty test set") {
    Checkpoint ckpt = make_checkpoint("redirection", 2, 5);
    Dataset empty;
    CHECK_THROWS_AS(eval_timing(ckpt, empty), std::invalid_argument);
}

}  // TEST_SUITE
