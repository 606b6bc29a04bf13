#include "netgrow/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "netgrow/special.hpp"

namespace netgrow {

namespace {

constexpr double kThetaClamp = 1e-12;

std::vector<ModelSpec> make_registry() {
    std::vector<ModelSpec> specs;
    auto add = [&](ModelSpec s) { specs.push_back(std::move(s)); };

    add({"redirection", ModelId::kRedirection, 1, 1, Prior{{{2, 1}}}, 0, 0, 0, 1, false, 1});
    add({"duplication_mutation", ModelId::kDuplicationMutation, 2, 1, Prior{{{2, 2}, {2, 2}}}, 0, 0, 0, 2, true, 2});
    add({"copying", ModelId::kCopying, 1, 1, Prior{{{2, 2}}}, 0, 0, 0, 1, false, 1});
    add({"random_connection", ModelId::kRandomConnection, 1, 0, Prior{{{1, 1}}}, 0, 0, 0, 1, false, 1});
    add({"connected_small_world", ModelId::kConnectedSmallWorld, 1, 0, Prior{{{1, 1}}}, 4, 0, 0, 0, false, 9});
    add({"growing_tree", ModelId::kGrowingTree, 1, std::nullopt, Prior{{{1, 1}}}, 0, 0, 0, 2, true, 2});
    add({"duplication_complementation", ModelId::kDuplicationComplementation, 2, std::nullopt, Prior{{{2, 2}, {2, 2}}}, 0, 0, 0, 2, true, 2});
    add({"jackson_rogers", ModelId::kJacksonRogers, 2, std::nullopt, Prior{{{1, 1}, {1, 1}}}, 0, 10, 10, 21, false, 21});
    add({"watts_strogatz", ModelId::kWattsStrogatz, 1, std::nullopt, Prior{{{1, 1}}}, 4, 0, 0, 0, false, 9});
    return specs;
}

const std::vector<ModelSpec>& all_specs() {
    static const std::vector<ModelSpec> specs = make_registry();
    return specs;
}

// Inversion sampling; cheap because n * p is small wherever this is used.
int sample_binomial(RngStream& rng, int trials, double p) {
    if (trials <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return trials;
    double u = rng.uniform();
    double q = 1.0 - p;
    double pmf = std::pow(q, trials);
    double cdf = pmf;
    int k = 0;
    while (u > cdf && k < trials) {
        pmf *= (static_cast<double>(trials - k) / (k + 1)) * (p / q);
        ++k;
        cdf += pmf;
    }
    return k;
}

// count distinct values from [0, bound), in draw order.
std::vector<node_t> sample_distinct(RngStream& rng, int count, node_t bound) {
    std::vector<node_t> out;
    out.reserve(count);
    while (static_cast<int>(out.size()) < count) {
        node_t v = static_cast<node_t>(rng.uniform_int(bound));
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
    return out;
}

Edge canonical(node_t u, node_t v) { return u < v ? Edge{u, v} : Edge{v, u}; }

void record_step(History* h, HistoryStep step) {
    if (h) h->steps.push_back(std::move(step));
}

void simulate_redirection(GraphBuilder& g, double theta, int n, RngStream& rng, History* hist) {
    while (g.num_nodes() < n) {
        node_t existing = g.num_nodes();
        node_t seed = static_cast<node_t>(rng.uniform_int(existing));
        node_t target = seed;
        if (g.degree(seed) > 0 && rng.bernoulli(theta)) {
            const auto& nbrs = g.neighbors(seed);
            target = nbrs[rng.uniform_int(nbrs.size())];
        }
        node_t source = g.add_node();
        g.add_edge(source, target);
        record_step(hist, {source, NodeSet({seed}), {canonical(source, target)}, {}});
    }
}

void simulate_copying(GraphBuilder& g, double theta, int n, RngStream& rng, History* hist) {
    while (g.num_nodes() < n) {
        node_t existing = g.num_nodes();
        node_t seed = static_cast<node_t>(rng.uniform_int(existing));
        std::vector<node_t> nbrs = g.neighbors(seed);
        node_t source = g.add_node();
        std::vector<Edge> added;
        g.add_edge(source, seed);
        added.push_back(canonical(source, seed));
        for (node_t u : nbrs) {
            if (rng.bernoulli(theta)) {
                g.add_edge(source, u);
                added.push_back(canonical(source, u));
            }
        }
        record_step(hist, {source, NodeSet({seed}), std::move(added), {}});
    }
}

void simulate_duplication_mutation(GraphBuilder& g, double theta1, double theta2, int n,
                                   RngStream& rng, History* hist) {
    while (g.num_nodes() < n) {
        node_t existing = g.num_nodes();
        // Stage 1: duplicate a seed's neighborhood; isolated nodes are dropped
        // and the step is retried with fresh randomness.
        node_t seed;
        std::vector<node_t> stage1;
        for (;;) {
            seed = static_cast<node_t>(rng.uniform_int(existing));
            stage1.clear();
            for (node_t u : g.neighbors(seed)) {
                if (rng.bernoulli(theta1)) stage1.push_back(u);
            }
            if (!stage1.empty()) break;
        }
        node_t source = g.add_node();
        std::vector<Edge> added;
        for (node_t u : stage1) {
            g.add_edge(source, u);
            added.push_back(canonical(source, u));
        }
        // Stage 2: random mutations among the pre-step nodes.
        int extra = sample_binomial(rng, existing, theta2 / existing);
        for (node_t u : sample_distinct(rng, extra, existing)) {
            if (g.add_edge(source, u)) added.push_back(canonical(source, u));
        }
        record_step(hist, {source, NodeSet({seed}), std::move(added), {}});
    }
}

void simulate_random_connection(GraphBuilder& g, double theta, int n, RngStream& rng, History* hist) {
    while (g.num_nodes() < n) {
        node_t source = g.add_node();
        node_t count = g.num_nodes();
        std::vector<Edge> added;
        if (rng.bernoulli(theta)) {
            for (;;) {
                node_t u = static_cast<node_t>(rng.uniform_int(count));
                node_t v = static_cast<node_t>(rng.uniform_int(count));
                if (u == v || g.has_edge(u, v)) continue;
                g.add_edge(u, v);
                added.push_back(canonical(u, v));
                break;
            }
        }
        record_step(hist, {source, NodeSet(), std::move(added), {}});
    }
}

std::vector<Edge> ring_edges(int n, int z) {
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(n) * (z / 2));
    for (int j = 1; j <= z / 2; ++j) {
        for (node_t i = 0; i < n; ++i) {
            edges.push_back(canonical(i, static_cast<node_t>((i + j) % n)));
        }
    }
    return edges;
}

void build_ring(GraphBuilder& g, int n, int z) {
    for (const auto& [u, v] : ring_edges(n, z)) g.add_edge(u, v);
}

void simulate_connected_small_world(GraphBuilder& g, double theta, int n, int z, RngStream& rng,
                                    History* hist) {
    for (const auto& [u, v] : ring_edges(n, z)) {
        std::vector<Edge> added;
        if (rng.bernoulli(theta)) {
            for (;;) {
                node_t a = static_cast<node_t>(rng.uniform_int(n));
                node_t b = static_cast<node_t>(rng.uniform_int(n));
                if (a == b || g.has_edge(a, b)) continue;
                g.add_edge(a, b);
                added.push_back(canonical(a, b));
                break;
            }
        }
        record_step(hist, {u, NodeSet(), std::move(added), {}});
        (void)v;
    }
}

void simulate_growing_tree(GraphBuilder& g, double theta, int n, RngStream& rng, History* hist) {
    while (g.num_nodes() < n) {
        node_t existing = g.num_nodes();
        double total = 0.0;
        for (node_t v = 0; v < existing; ++v) {
            int d = g.degree(v);
            if (d <= 0) throw std::logic_error("growing_tree: zero-degree node in tree");
            total += std::pow(static_cast<double>(d), theta);
        }
        double x = rng.uniform() * total;
        node_t target = existing - 1;
        double acc = 0.0;
        for (node_t v = 0; v < existing; ++v) {
            acc += std::pow(static_cast<double>(g.degree(v)), theta);
            if (x <= acc) {
                target = v;
                break;
            }
        }
        node_t source = g.add_node();
        g.add_edge(source, target);
        record_step(hist, {source, NodeSet({target}), {canonical(source, target)}, {}});
    }
}

void simulate_duplication_complementation(GraphBuilder& g, double theta1, double theta2, int n,
                                          RngStream& rng, History* hist) {
    while (g.num_nodes() < n) {
        node_t existing = g.num_nodes();
        node_t seed;
        std::vector<node_t> connect_to;
        std::vector<Edge> removals;
        // Drawn effects are buffered and only applied once the new node is
        // known to keep at least one edge; a dropped attempt leaves no trace.
        for (;;) {
            seed = static_cast<node_t>(rng.uniform_int(existing));
            connect_to.clear();
            removals.clear();
            for (node_t u : g.neighbors(seed)) {
                if (rng.bernoulli(0.5)) {
                    if (rng.bernoulli(theta1)) connect_to.push_back(u);
                } else {
                    if (rng.bernoulli(1.0 - theta1)) removals.push_back(canonical(seed, u));
                }
            }
            bool connect_seed = rng.bernoulli(theta2);
            if (connect_seed) connect_to.push_back(seed);
            if (!connect_to.empty()) break;
        }
        for (const auto& [a, b] : removals) g.remove_edge(a, b);
        node_t source = g.add_node();
        std::vector<Edge> added;
        for (node_t u : connect_to) {
            g.add_edge(source, u);
            added.push_back(canonical(source, u));
        }
        record_step(hist, {source, NodeSet({seed}), std::move(added), std::move(removals)});
    }
}

void simulate_jackson_rogers(GraphBuilder& g, double theta_rnd, double theta_nbr, int n, int m_rnd,
                             int m_nbr, RngStream& rng, History* hist) {
    while (g.num_nodes() < n) {
        node_t existing = g.num_nodes();
        std::vector<node_t> seeds = sample_distinct(rng, m_rnd, existing);
        // Union of seed neighborhoods in the pre-step graph.
        std::vector<node_t> pool;
        for (node_t s : seeds) {
            const auto& nbrs = g.neighbors(s);
            pool.insert(pool.end(), nbrs.begin(), nbrs.end());
        }
        std::sort(pool.begin(), pool.end());
        pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

        node_t source = g.add_node();
        std::vector<Edge> added;
        for (node_t s : seeds) {
            if (rng.bernoulli(theta_rnd)) {
                g.add_edge(source, s);
                added.push_back(canonical(source, s));
            }
        }
        int take = std::min<int>(m_nbr, static_cast<int>(pool.size()));
        std::vector<node_t> picks;
        if (take == static_cast<int>(pool.size())) {
            picks = pool;
        } else {
            for (node_t idx : sample_distinct(rng, take, static_cast<node_t>(pool.size()))) {
                picks.push_back(pool[idx]);
            }
        }
        for (node_t u : picks) {
            if (rng.bernoulli(theta_nbr)) {
                if (g.add_edge(source, u)) added.push_back(canonical(source, u));
            }
        }
        record_step(hist, {source, NodeSet::from_unsorted(seeds), std::move(added), {}});
    }
}

void simulate_watts_strogatz(GraphBuilder& g, double theta, int n, int z, RngStream& rng,
                             History* hist) {
    for (const auto& [u, v] : ring_edges(n, z)) {
        std::vector<Edge> added;
        std::vector<Edge> removed;
        if (rng.bernoulli(theta)) {
            std::vector<node_t> candidates;
            candidates.reserve(n);
            for (node_t w = 0; w < n; ++w) {
                if (w != u && !g.has_edge(u, w)) candidates.push_back(w);
            }
            if (!candidates.empty()) {
                node_t w = candidates[rng.uniform_int(candidates.size())];
                g.remove_edge(u, v);
                g.add_edge(u, w);
                removed.push_back(canonical(u, v));
                added.push_back(canonical(u, w));
            }
        }
        record_step(hist, {u, NodeSet(), std::move(added), std::move(removed)});
    }
}

}  // namespace

const ModelSpec& registry(const std::string& name) {
    for (const auto& spec : all_specs()) {
        if (spec.name == name) return spec;
    }
    std::string known;
    for (const auto& spec : all_specs()) {
        if (!known.empty()) known += ", ";
        known += spec.name;
    }
    throw std::invalid_argument("unknown model \"" + name + "\"; valid names: " + known);
}

const std::vector<std::string>& model_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& spec : all_specs()) out.push_back(spec.name);
        return out;
    }();
    return names;
}

ModelParams sample_prior(const ModelSpec& spec, RngStream& rng) {
    ModelParams params;
    params.theta.reserve(spec.prior.size());
    for (const auto& [alpha, beta] : spec.prior.components) {
        double draw = rng.beta(alpha, beta);
        params.theta.push_back(std::clamp(draw, kThetaClamp, 1.0 - kThetaClamp));
    }
    return params;
}

double prior_log_density(const ModelSpec& spec, const std::vector<double>& theta) {
    if (theta.size() != spec.prior.size()) {
        throw std::invalid_argument("prior_log_density: theta arity mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        sum += beta_log_pdf(theta[i], spec.prior.components[i].alpha, spec.prior.components[i].beta);
    }
    return sum;
}

double prior_entropy(const ModelSpec& spec) {
    double sum = 0.0;
    for (const auto& [alpha, beta] : spec.prior.components) {
        sum += beta_entropy(alpha, beta);
    }
    return sum;
}

SimResult simulate(const ModelSpec& spec, const std::vector<double>& theta, int n, RngStream& rng,
                   bool record_history) {
    if (static_cast<int>(theta.size()) != spec.param_count) {
        throw std::invalid_argument("simulate: theta arity mismatch for " + spec.name);
    }
    for (double t : theta) {
        if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("simulate: theta outside (0, 1)");
    }
    if (n < spec.min_nodes) {
        throw std::invalid_argument("simulate: " + spec.name + " requires at least " +
                                    std::to_string(spec.min_nodes) + " nodes");
    }

    bool ring_model = spec.id == ModelId::kConnectedSmallWorld || spec.id == ModelId::kWattsStrogatz;
    int start_nodes = ring_model ? n : spec.initial_nodes;
    GraphBuilder g(start_nodes);
    if (ring_model) {
        build_ring(g, n, spec.ring_degree);
    } else if (spec.initial_edge) {
        g.add_edge(0, 1);
    } else if (spec.id == ModelId::kJacksonRogers) {
        for (node_t u = 0; u < start_nodes; ++u) {
            for (node_t v = u + 1; v < start_nodes; ++v) g.add_edge(u, v);
        }
    }

    History history;
    History* hist = record_history ? &history : nullptr;
    if (record_history) history.initial = g.snapshot();

    switch (spec.id) {
        case ModelId::kRedirection:
            simulate_redirection(g, theta[0], n, rng, hist);
            break;
        case ModelId::kDuplicationMutation:
            simulate_duplication_mutation(g, theta[0], theta[1], n, rng, hist);
            break;
        case ModelId::kCopying:
            simulate_copying(g, theta[0], n, rng, hist);
            break;
        case ModelId::kRandomConnection:
            simulate_random_connection(g, theta[0], n, rng, hist);
            break;
        case ModelId::kConnectedSmallWorld:
            simulate_connected_small_world(g, theta[0], n, spec.ring_degree, rng, hist);
            break;
        case ModelId::kGrowingTree:
            simulate_growing_tree(g, theta[0], n, rng, hist);
            break;
        case ModelId::kDuplicationComplementation:
            simulate_duplication_complementation(g, theta[0], theta[1], n, rng, hist);
            break;
        case ModelId::kJacksonRogers:
            simulate_jackson_rogers(g, theta[0], theta[1], n, spec.m_rnd, spec.m_nbr, rng, hist);
            break;
        case ModelId::kWattsStrogatz:
            simulate_watts_strogatz(g, theta[0], n, spec.ring_degree, rng, hist);
            break;
    }

    SimResult result;
    result.graph = std::move(g).build();
    result.history = std::move(history);
    return result;
}

Graph replay(const History& history) {
    GraphBuilder g(history.initial);
    for (const auto& step : history.steps) {
        while (step.source >= g.num_nodes()) g.add_node();
        for (const auto& [u, v] : step.removed) g.remove_edge(u, v);
        for (const auto& [u, v] : step.added) g.add_edge(u, v);
    }
    return std::move(g).build();
}

}  // namespace netgrow
