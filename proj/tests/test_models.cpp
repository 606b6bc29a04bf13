#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <set>

#include "netgrow/models.hpp"
#include "netgrow/serialize.hpp"
#include "netgrow/special.hpp"
#include "testutil.hpp"

using namespace netgrow;

TEST_SUITE("models") {

TEST_CASE("registry matches the model table") {
    const auto& red = registry("redirection");
    CHECK(red.param_count == 1);
    CHECK(red.localization == 1);
    CHECK(red.prior.components[0].alpha == 2);
    CHECK(red.prior.components[0].beta == 1);

    const auto& dm = registry("duplication_mutation");
    CHECK(dm.param_count == 2);
    CHECK(dm.localization == 1);
    for (const auto& c : dm.prior.components) {
        CHECK(c.alpha == 2);
        CHECK(c.beta == 2);
    }

    CHECK(registry("copying").localization == 1);
    CHECK(registry("random_connection").localization == 0);
    CHECK(registry("connected_small_world").ring_degree == 4);
    CHECK_FALSE(registry("growing_tree").localization.has_value());
    CHECK_FALSE(registry("duplication_complementation").localization.has_value());
    const auto& jr = registry("jackson_rogers");
    CHECK(jr.m_rnd == 10);
    CHECK(jr.m_nbr == 10);
    CHECK(jr.initial_nodes == 21);
    CHECK(registry("watts_strogatz").ring_degree == 4);
    CHECK(model_names().size() == 9);
    CHECK_THROWS_AS(registry("nosuch"), std::invalid_argument);
}

TEST_CASE("sample_prior empirical means match beta expectations") {
    auto empirical_mean = [](const ModelSpec& spec, int component, int draws) {
        RngStream rng(99);
        double sum = 0.0;
        for (int i = 0; i < draws; ++i) sum += sample_prior(spec, rng).theta[component];
        return sum / draws;
    };
    CHECK(std::fabs(empirical_mean(registry("random_connection"), 0, 100000) - 0.5) < 0.005);
    CHECK(std::fabs(empirical_mean(registry("redirection"), 0, 100000) - 2.0 / 3.0) < 0.005);
    CHECK(std::fabs(empirical_mean(registry("duplication_mutation"), 0, 100000) - 0.5) < 0.005);
    CHECK(std::fabs(empirical_mean(registry("duplication_mutation"), 1, 100000) - 0.5) < 0.005);
}

TEST_CASE("prior_log_density") {
    CHECK(prior_log_density(registry("random_connection"), {0.3}) == doctest::Approx(0.0));
    CHECK(prior_log_density(registry("redirection"), {0.5}) == doctest::Approx(0.0));
    CHECK(prior_log_density(registry("copying"), {0.5}) ==
          doctest::Approx(std::log(1.5)).epsilon(1e-12));
    CHECK(std::isinf(prior_log_density(registry("redirection"), {1.5})));
}

TEST_CASE("prior_entropy") {
    CHECK(prior_entropy(registry("random_connection")) == doctest::Approx(0.0));
    CHECK(prior_entropy(registry("redirection")) ==
          doctest::Approx(-std::log(2.0) + 0.5).epsilon(1e-12));
    double h22 = beta_entropy(2, 2);
    CHECK(prior_entropy(registry("duplication_mutation")) ==
          doctest::Approx(2.0 * h22).epsilon(1e-12));
    // quadrature cross-check of the two-component entropy
    double quad = testutil::integrate(
        [](double x) {
            double lp = beta_log_pdf(x, 2, 2);
            return -std::exp(lp) * lp;
        },
        1e-9, 1.0 - 1e-9);
    CHECK(std::fabs(prior_entropy(registry("duplication_mutation")) - 2.0 * quad) < 1e-6);
}

TEST_CASE("redirection and growing_tree always emit trees") {
    for (const char* name : {"redirection", "growing_tree"}) {
        const auto& spec = registry(name);
        for (int s = 0; s < 100; ++s) {
            RngStream rng = RngStream::split(5, s);
            ModelParams params = sample_prior(spec, rng);
            SimResult sim = simulate(spec, params.theta, 200, rng);
            CHECK(sim.graph.num_nodes() == 200);
            CHECK(sim.graph.num_edges() == 199);
            CHECK(is_connected(sim.graph));
        }
    }
}

TEST_CASE("ring models at theta=0 leave the ring intact") {
    SimResult csw = [] {
        RngStream rng(1);
        return simulate(registry("connected_small_world"), {1e-12}, 50, rng);
    }();
    CHECK(csw.graph.num_edges() == 100);
    CHECK(csw.graph.degrees() == std::vector<int>(50, 4));

    SimResult ws = [] {
        RngStream rng(2);
        return simulate(registry("watts_strogatz"), {1e-12}, 50, rng);
    }();
    CHECK(ws.graph.num_edges() == 100);
    CHECK(ws.graph.degrees() == std::vector<int>(50, 4));
}

TEST_CASE("random_connection edge count follows the binomial mean") {
    const auto& spec = registry("random_connection");
    int seeds = 200;
    double mean = 0.0;
    for (int s = 0; s < seeds; ++s) {
        RngStream rng = RngStream::split(7, s);
        SimResult sim = simulate(spec, {0.5}, 1000, rng, false);
        mean += static_cast<double>(sim.graph.num_edges());
    }
    mean /= seeds;
    double expect = 999 * 0.5;
    double sigma = std::sqrt(999 * 0.25 / seeds);
    CHECK(std::fabs(mean - expect) < 4.0 * sigma);
}

TEST_CASE("jackson_rogers at the initial size is the complete graph") {
    RngStream rng(3);
    SimResult sim = simulate(registry("jackson_rogers"), {0.5, 0.5}, 21, rng);
    CHECK(sim.graph.num_nodes() == 21);
    CHECK(sim.graph.num_edges() == 21 * 20 / 2);
    CHECK_THROWS_AS(simulate(registry("jackson_rogers"), {0.5, 0.5}, 20, rng),
                    std::invalid_argument);
}

TEST_CASE("copying output is connected and every non-root node has degree") {
    const auto& spec = registry("copying");
    for (int s = 0; s < 20; ++s) {
        RngStream rng = RngStream::split(13, s);
        ModelParams params = sample_prior(spec, rng);
        SimResult sim = simulate(spec, params.theta, 100, rng);
        CHECK(is_connected(sim.graph));
        for (node_t v = 1; v < 100; ++v) CHECK(sim.graph.degree(v) >= 1);
    }
}

TEST_CASE("duplication models reach exactly n nodes despite drops") {
    for (const char* name : {"duplication_mutation", "duplication_complementation"}) {
        const auto& spec = registry(name);
        for (int s = 0; s < 20; ++s) {
            RngStream rng = RngStream::split(29, s);
            ModelParams params = sample_prior(spec, rng);
            SimResult sim = simulate(spec, params.theta, 120, rng);
            CHECK(sim.graph.num_nodes() == 120);
        }
    }
}

TEST_CASE("simulation is deterministic by seed") {
    for (const std::string& name : model_names()) {
        const auto& spec = registry(name);
        auto run = [&](std::uint64_t seed) {
            RngStream rng = RngStream::split(seed, 0);
            ModelParams params = sample_prior(spec, rng);
            SimResult sim = simulate(spec, params.theta, 60, rng);
            return serialize_graph(sim.graph, params.theta);
        };
        CHECK(run(42) == run(42));
        CHECK(run(42) != run(43));
    }
}

TEST_CASE("history replay reproduces the simulated graph for every model") {
    for (const std::string& name : model_names()) {
        const auto& spec = registry(name);
        for (int s = 0; s < 5; ++s) {
            RngStream rng = RngStream::split(61, s);
            ModelParams params = sample_prior(spec, rng);
            SimResult sim = simulate(spec, params.theta, 64, rng);
            CHECK(replay(sim.history) == sim.graph);
        }
    }
}

TEST_CASE("growth is monotonic except for the two deleting models") {
    for (const std::string& name : model_names()) {
        if (name == "watts_strogatz" || name == "duplication_complementation") continue;
        const auto& spec = registry(name);
        RngStream rng = RngStream::split(71, 1);
        ModelParams params = sample_prior(spec, rng);
        SimResult sim = simulate(spec, params.theta, 60, rng);
        for (const auto& step : sim.history.steps) CHECK(step.removed.empty());
    }
}

TEST_CASE("simulate validates inputs") {
    RngStream rng(5);
    CHECK_THROWS_AS(simulate(registry("growing_tree"), {0.5}, 1, rng), std::invalid_argument);
    CHECK_THROWS_AS(simulate(registry("connected_small_world"), {0.5}, 8, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(simulate(registry("redirection"), {1.5}, 10, rng), std::invalid_argument);
    CHECK_THROWS_AS(simulate(registry("redirection"), {0.5, 0.5}, 10, rng), std::invalid_argument);
}

}  // TEST_SUITE
