#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "netgrow/oracles.hpp"
#include "netgrow/special.hpp"

using namespace netgrow;

namespace {

Graph graph_with_edges(int n, const std::vector<Edge>& edges) {
    GraphBuilder b(n);
    for (const auto& [u, v] : edges) b.add_edge(u, v);
    return std::move(b).build();
}

Graph permuted(const Graph& g, const std::vector<node_t>& perm) {
    GraphBuilder b(g.num_nodes());
    for (const auto& [u, v] : g.edges()) b.add_edge(perm[u], perm[v]);
    return std::move(b).build();
}

}  // namespace

TEST_SUITE("oracles") {

TEST_CASE("posterior_random_connection") {
    Graph g = graph_with_edges(5, {{0, 1}, {2, 3}});
    BetaPosterior post = posterior_random_connection(g);
    CHECK(post.components[0].alpha == 3.0);
    CHECK(post.components[0].beta == 3.0);

    Graph pair = graph_with_edges(2, {});
    post = posterior_random_connection(pair);
    CHECK(post.components[0].alpha == 1.0);
    CHECK(post.components[0].beta == 2.0);

    RngStream rng(1);
    SimResult sim = simulate(registry("random_connection"), {0.5}, 1000, rng);
    // Directly rebuild a graph with exactly 499 edges for the arithmetic check.
    GraphBuilder b(1000);
    int added = 0;
    for (node_t u = 0; added < 499; ++u) {
        b.add_edge(u, u + 1);
        ++added;
    }
    post = posterior_random_connection(std::move(b).build());
    CHECK(post.components[0].alpha == 500.0);
    CHECK(post.components[0].beta == 501.0);
    CHECK(post.means()[0] == doctest::Approx(0.4995).epsilon(1e-4));

    GraphBuilder dense(3);
    dense.add_edge(0, 1);
    dense.add_edge(1, 2);
    dense.add_edge(0, 2);
    CHECK_THROWS_AS(posterior_random_connection(std::move(dense).build()), std::invalid_argument);
    (void)sim;
}

TEST_CASE("posterior_connected_small_world") {
    GraphBuilder b(10);
    int edges = 0;
    for (node_t u = 0; u < 10 && edges < 23; ++u) {
        for (node_t v = u + 1; v < 10 && edges < 23; ++v) {
            b.add_edge(u, v);
            ++edges;
        }
    }
    BetaPosterior post = posterior_connected_small_world(std::move(b).build(), 4);
    CHECK(post.components[0].alpha == 4.0);
    CHECK(post.components[0].beta == 18.0);

    RngStream rng(2);
    SimResult ring = simulate(registry("connected_small_world"), {1e-12}, 20, rng);
    post = posterior_connected_small_world(ring.graph, 4);
    CHECK(post.components[0].alpha == 1.0);
    CHECK(post.components[0].beta == 41.0);

    // Simulated graph: shortcut count from the history must agree with the
    // posterior computed from the edge count alone.
    SimResult sim = simulate(registry("connected_small_world"), {0.35}, 50, rng);
    int shortcuts = 0;
    for (const auto& step : sim.history.steps) shortcuts += static_cast<int>(step.added.size());
    post = posterior_connected_small_world(sim.graph, 4);
    CHECK(post.components[0].alpha == doctest::Approx(1.0 + shortcuts));
    CHECK(post.components[0].beta == doctest::Approx(1.0 + 100.0 - shortcuts));

    Graph sparse = graph_with_edges(10, {{0, 1}});
    CHECK_THROWS_AS(posterior_connected_small_world(sparse, 4), std::invalid_argument);
}

TEST_CASE("redirection step probability marginalizes the seed") {
    // Path 0-1 plus a new node attaching to either endpoint: probability 1/2
    // regardless of theta (both endpoints have degree 1).
    History h;
    h.initial = graph_with_edges(2, {{0, 1}});
    h.steps.push_back({2, NodeSet({0}), {{1, 2}}, {}});
    for (double theta : {0.1, 0.5, 0.9}) {
        CHECK(std::exp(history_log_likelihood(ModelId::kRedirection, h, {theta})) ==
              doctest::Approx(0.5).epsilon(1e-12));
    }

    // Star with center 0 and two leaves; attaching to the center has
    // probability (1 + theta) / 3.
    History star;
    star.initial = graph_with_edges(3, {{0, 1}, {0, 2}});
    star.steps.push_back({3, NodeSet({0}), {{0, 3}}, {}});
    for (double theta : {0.0, 0.3, 0.8}) {
        CHECK(std::exp(history_log_likelihood(ModelId::kRedirection, star, {theta})) ==
              doctest::Approx((1.0 + theta) / 3.0).epsilon(1e-12));
    }
}

TEST_CASE("copying at theta=0 reduces to uniform seed choice") {
    RngStream rng(3);
    SimResult sim = simulate(registry("copying"), {1e-12}, 30, rng);
    double ll = history_log_likelihood(ModelId::kCopying, sim.history, {0.0});
    double expect = 0.0;
    for (int m = 1; m < 30; ++m) expect += std::log(1.0 / m);
    CHECK(ll == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("simulated histories have finite nonpositive log likelihood") {
    for (auto [name, id] : {std::pair<const char*, ModelId>{"redirection", ModelId::kRedirection},
                            {"copying", ModelId::kCopying}}) {
        const auto& spec = registry(name);
        for (int s = 0; s < 10; ++s) {
            RngStream rng = RngStream::split(17, s);
            ModelParams params = sample_prior(spec, rng);
            SimResult sim = simulate(spec, params.theta, 50, rng);
            double ll = history_log_likelihood(id, sim.history, params.theta);
            CHECK(std::isfinite(ll));
            CHECK(ll <= 0.0);
        }
    }
}

TEST_CASE("history arity errors are rejected") {
    History bad;
    bad.initial = graph_with_edges(2, {{0, 1}});
    bad.steps.push_back({2, NodeSet({0}), {{0, 2}, {1, 2}}, {}});
    CHECK_THROWS_AS(history_log_likelihood(ModelId::kRedirection, bad, {0.5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(history_log_likelihood(ModelId::kGrowingTree, bad, {0.5}),
                    std::invalid_argument);
}

TEST_CASE("brute force posterior on the 3-path equals the prior") {
    Graph path3 = graph_with_edges(3, {{0, 1}, {1, 2}});
    const Prior& prior = registry("redirection").prior;
    GridPosterior post = bruteforce_posterior_redirection(path3, prior);
    double total = 0.0;
    for (double m : post.mass) total += m;
    CHECK(std::fabs(total - 1.0) < 1e-12);
    // Compare against the prior discretized with identical weights.
    double norm = 0.0;
    std::vector<double> prior_mass(post.grid.size());
    for (std::size_t j = 0; j < post.grid.size(); ++j) {
        double w = (j == 0 || j + 1 == post.grid.size()) ? 0.5 : 1.0;
        prior_mass[j] = w * std::exp(beta_log_pdf(post.grid[j], 2, 1));
        norm += prior_mass[j];
    }
    for (std::size_t j = 0; j < post.grid.size(); ++j) {
        CHECK(std::fabs(post.mass[j] - prior_mass[j] / norm) < 1e-9);
    }
}

TEST_CASE("brute force posterior prefers hubs for the star") {
    Graph path4 = graph_with_edges(4, {{0, 1}, {1, 2}, {2, 3}});
    Graph star4 = graph_with_edges(4, {{0, 1}, {0, 2}, {0, 3}});
    const Prior& prior = registry("redirection").prior;
    GridPosterior p_path = bruteforce_posterior_redirection(path4, prior);
    GridPosterior p_star = bruteforce_posterior_redirection(star4, prior);
    CHECK(p_star.mean() > p_path.mean());
}

TEST_CASE("brute force posterior is invariant under relabeling") {
    RngStream rng(11);
    const auto& spec = registry("redirection");
    ModelParams params = sample_prior(spec, rng);
    SimResult sim = simulate(spec, params.theta, 7, rng);
    GridPosterior base = bruteforce_posterior_redirection(sim.graph, spec.prior);

    std::vector<node_t> perm = {3, 0, 6, 2, 5, 1, 4};
    GridPosterior shuffled =
        bruteforce_posterior_redirection(permuted(sim.graph, perm), spec.prior);
    for (std::size_t j = 0; j < base.mass.size(); ++j) {
        CHECK(std::fabs(base.mass[j] - shuffled.mass[j]) < 1e-12);
    }
}

TEST_CASE("brute force guards") {
    const Prior& prior = registry("redirection").prior;
    GraphBuilder big(9);
    for (node_t i = 0; i + 1 < 9; ++i) big.add_edge(i, i + 1);
    CHECK_THROWS_AS(bruteforce_posterior_redirection(std::move(big).build(), prior),
                    std::domain_error);
    Graph cycle = graph_with_edges(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
    CHECK_THROWS_AS(bruteforce_posterior_redirection(cycle, prior), std::invalid_argument);
}

TEST_CASE("exact_baseline_mi") {
    const auto& spec = registry("random_connection");
    // Single-node graphs give the flat Beta(1, 1) posterior: baseline 0.
    Graph trivial = graph_with_edges(1, {});
    std::vector<std::pair<std::vector<double>, const Graph*>> pairs = {{{0.3}, &trivial},
                                                                       {{0.9}, &trivial}};
    CHECK(exact_baseline_mi(spec, pairs) == doctest::Approx(0.0).epsilon(1e-12));

    Graph g = graph_with_edges(5, {{0, 1}, {2, 3}});
    pairs = {{{0.5}, &g}};
    CHECK(exact_baseline_mi(spec, pairs) ==
          doctest::Approx(std::log(1.875)).epsilon(1e-12));

    // Monte-Carlo: mutual information estimates are positive for an
    // informative posterior family.
    std::vector<SimResult> sims;
    std::vector<std::vector<double>> thetas;
    for (int i = 0; i < 1000; ++i) {
        RngStream rng = RngStream::split(23, i);
        ModelParams params = sample_prior(spec, rng);
        sims.push_back(simulate(spec, params.theta, 100, rng, false));
        thetas.push_back(params.theta);
    }
    pairs.clear();
    for (std::size_t i = 0; i < sims.size(); ++i) pairs.emplace_back(thetas[i], &sims[i].graph);
    CHECK(exact_baseline_mi(spec, pairs) > 0.0);
}

TEST_CASE("exact posterior credible intervals are calibrated (smoke)") {
    const auto& spec = registry("random_connection");
    int cover = 0;
    int trials = 300;
    for (int i = 0; i < trials; ++i) {
        RngStream rng = RngStream::split(31, i);
        ModelParams params = sample_prior(spec, rng);
        SimResult sim = simulate(spec, params.theta, 200, rng, false);
        BetaPosterior post = posterior_random_connection(sim.graph);
        double lo = beta_quantile(0.05, post.components[0].alpha, post.components[0].beta);
        double hi = beta_quantile(0.95, post.components[0].alpha, post.components[0].beta);
        if (params.theta[0] >= lo && params.theta[0] <= hi) ++cover;
    }
    double rate = static_cast<double>(cover) / trials;
    CHECK(rate > 0.84);
    CHECK(rate < 0.96);
}

}  // TEST_SUITE
