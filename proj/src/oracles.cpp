#include "netgrow/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "netgrow/serialize.hpp"
#include "netgrow/special.hpp"

namespace netgrow {

double BetaPosterior::log_density(const std::vector<double>& theta) const {
    if (theta.size() != components.size()) {
        throw std::invalid_argument("BetaPosterior: theta arity mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        sum += beta_log_pdf(theta[i], components[i].alpha, components[i].beta);
    }
    return sum;
}

std::vector<double> BetaPosterior::means() const {
    std::vector<double> out;
    out.reserve(components.size());
    for (const auto& [a, b] : components) out.push_back(a / (a + b));
    return out;
}

std::string BetaPosterior::to_json() const {
    std::string alpha = "[";
    std::string beta = "[";
    for (std::size_t i = 0; i < components.size(); ++i) {
        if (i) {
            alpha += ',';
            beta += ',';
        }
        alpha += format_double(components[i].alpha);
        beta += format_double(components[i].beta);
    }
    return "{\"alpha\":" + alpha + "],\"beta\":" + beta + "]}";
}

double GridPosterior::mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) m += grid[i] * mass[i];
    return m;
}

std::string GridPosterior::to_json() const {
    std::string g = "[";
    std::string m = "[";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (i) {
            g += ',';
            m += ',';
        }
        g += format_double(grid[i]);
        m += format_double(mass[i]);
    }
    return "{\"grid\":" + g + "],\"mass\":" + m + "]}";
}

BetaPosterior posterior_random_connection(const Graph& g) {
    auto n = static_cast<double>(g.num_nodes());
    auto e = static_cast<double>(g.num_edges());
    if (e > n - 1) {
        throw std::invalid_argument("posterior_random_connection: |E| > n - 1 is inconsistent "
                                    "with the random connection model");
    }
    return BetaPosterior{{{1.0 + e, n - e}}};
}

BetaPosterior posterior_connected_small_world(const Graph& g, int z) {
    double half_ring = 0.5 * static_cast<double>(g.num_nodes()) * z;
    double shortcuts = static_cast<double>(g.num_edges()) - half_ring;
    if (shortcuts < 0.0 || shortcuts > half_ring) {
        throw std::invalid_argument("posterior_connected_small_world: edge count inconsistent "
                                    "with a ring of degree " + std::to_string(z));
    }
    return BetaPosterior{{{1.0 + shortcuts, 1.0 + half_ring - shortcuts}}};
}

namespace {

// log P(attach to target | prefix graph, theta) for one redirection step,
// seed marginalized uniformly; the 1/m factor is included.
double redirection_step_log_prob(const GraphBuilder& g, node_t target, double theta) {
    double m = static_cast<double>(g.num_nodes());
    if (g.degree(target) == 0) return -std::log(m);
    double c = 0.0;
    for (node_t s : g.neighbors(target)) c += 1.0 / g.degree(s);
    return std::log(((1.0 - theta) + theta * c) / m);
}

double copying_step_log_prob(const GraphBuilder& g, const std::vector<node_t>& targets,
                             double theta) {
    double m = static_cast<double>(g.num_nodes());
    int copied = static_cast<int>(targets.size()) - 1;
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> terms;
    for (node_t s : targets) {
        bool feasible = true;
        for (node_t u : targets) {
            if (u != s && !g.has_edge(s, u)) {
                feasible = false;
                break;
            }
        }
        if (!feasible) continue;
        double lp = 0.0;
        if (copied > 0) lp += copied * std::log(theta);
        int skipped = g.degree(s) - copied;
        if (skipped > 0) lp += skipped * std::log1p(-theta);
        terms.push_back(lp);
        best = std::max(best, lp);
    }
    if (terms.empty() || best == -std::numeric_limits<double>::infinity()) {
        return -std::numeric_limits<double>::infinity();
    }
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - best);
    return best + std::log(acc) - std::log(m);
}

}  // namespace

double history_log_likelihood(ModelId model, const History& history,
                              const std::vector<double>& theta) {
    if (model != ModelId::kRedirection && model != ModelId::kCopying) {
        throw std::invalid_argument("history_log_likelihood supports redirection and copying only");
    }
    double theta0 = theta.at(0);
    GraphBuilder g(history.initial);
    double total = 0.0;
    for (const auto& step : history.steps) {
        if (!step.removed.empty()) {
            throw std::invalid_argument("history_log_likelihood: unexpected edge removal");
        }
        if (model == ModelId::kRedirection && step.added.size() != 1) {
            throw std::invalid_argument("history_log_likelihood: redirection steps add one edge");
        }
        if (step.added.empty()) {
            throw std::invalid_argument("history_log_likelihood: step with no edges");
        }
        std::vector<node_t> targets;
        for (const auto& [u, v] : step.added) {
            targets.push_back(u == step.source ? v : u);
            if (u != step.source && v != step.source) {
                throw std::invalid_argument("history_log_likelihood: edge not incident to source");
            }
        }
        if (model == ModelId::kRedirection) {
            total += redirection_step_log_prob(g, targets[0], theta0);
        } else {
            total += copying_step_log_prob(g, targets, theta0);
        }
        while (step.source >= g.num_nodes()) g.add_node();
        for (const auto& [u, v] : step.added) g.add_edge(u, v);
    }
    return total;
}

namespace {

// Sums prod_t (1 + (c_t - 1) theta) over all consistent insertion orders as a
// polynomial in theta. Prefix-independent 1/m factors cancel in normalization.
class OrderingEnumerator {
  public:
    explicit OrderingEnumerator(const Graph& g) : n_(g.num_nodes()), adj_(n_, 0) {
        for (node_t u = 0; u < n_; ++u) {
            for (node_t v : g.neighbors(u)) adj_[u] |= (1u << v);
        }
        total_.assign(n_, 0.0);
        kahan_.assign(n_, 0.0);
    }

    std::vector<double> run() {
        std::vector<double> poly(n_, 0.0);
        poly[0] = 1.0;
        for (node_t v = 0; v < n_; ++v) dfs(1u << v, 1, poly);
        return total_;
    }

  private:
    void accumulate(const std::vector<double>& poly) {
        for (int i = 0; i < n_; ++i) {
            double y = poly[i] - kahan_[i];
            double t = total_[i] + y;
            kahan_[i] = (t - total_[i]) - y;
            total_[i] = t;
        }
    }

    void dfs(std::uint32_t mask, int depth, const std::vector<double>& poly) {
        if (depth == n_) {
            accumulate(poly);
            return;
        }
        for (node_t v = 0; v < n_; ++v) {
            if (mask & (1u << v)) continue;
            std::uint32_t earlier = adj_[v] & mask;
            if (std::popcount(earlier) != 1) continue;  // one edge per step
            node_t target = static_cast<node_t>(std::countr_zero(earlier));
            std::uint32_t tn = adj_[target] & mask;
            double c;
            if (tn == 0) {
                c = 1.0;  // isolated seed falls back to a direct connection
            } else {
                c = 0.0;
                std::uint32_t rest = tn;
                while (rest) {
                    node_t s = static_cast<node_t>(std::countr_zero(rest));
                    rest &= rest - 1;
                    c += 1.0 / std::popcount(adj_[s] & mask);
                }
            }
            std::vector<double> next(n_, 0.0);
            double b = c - 1.0;
            for (int i = 0; i < depth; ++i) {
                next[i] += poly[i];
                if (i + 1 < n_) next[i + 1] += poly[i] * b;
            }
            dfs(mask | (1u << v), depth + 1, next);
        }
    }

    int n_;
    std::vector<std::uint32_t> adj_;
    std::vector<double> total_;
    std::vector<double> kahan_;
};

}  // namespace

GridPosterior bruteforce_posterior_redirection(const Graph& g, const Prior& prior,
                                               int grid_points) {
    if (g.num_nodes() > 8) {
        throw std::domain_error("brute-force posterior: n > 8 makes the ordering sum infeasible; "
                                "use the neural estimator instead");
    }
    if (g.num_nodes() < 2) throw std::invalid_argument("brute-force posterior: need n >= 2");
    if (g.num_edges() != static_cast<std::size_t>(g.num_nodes()) - 1 || !is_connected(g)) {
        throw std::invalid_argument("brute-force posterior: input must be a tree");
    }
    if (prior.size() != 1) throw std::invalid_argument("brute-force posterior: p = 1 prior required");
    if (grid_points < 2) throw std::invalid_argument("brute-force posterior: need >= 2 grid points");

    OrderingEnumerator enumerator(g);
    std::vector<double> poly = enumerator.run();

    GridPosterior post;
    post.grid.resize(grid_points);
    post.mass.resize(grid_points);
    double a = prior.components[0].alpha;
    double b = prior.components[0].beta;
    for (int j = 0; j < grid_points; ++j) {
        double theta = static_cast<double>(j + 1) / (grid_points + 1);
        post.grid[j] = theta;
        double lik = 0.0;
        for (int i = static_cast<int>(poly.size()) - 1; i >= 0; --i) lik = lik * theta + poly[i];
        double density = std::max(lik, 0.0) * std::exp(beta_log_pdf(theta, a, b));
        post.mass[j] = density;
    }
    // Trapezoid weights on the uniform grid, then exact normalization.
    double total = 0.0;
    double kahan = 0.0;
    for (int j = 0; j < grid_points; ++j) {
        double w = (j == 0 || j == grid_points - 1) ? 0.5 : 1.0;
        post.mass[j] *= w;
        double y = post.mass[j] - kahan;
        double t = total + y;
        kahan = (t - total) - y;
        total = t;
    }
    if (total <= 0.0) throw std::runtime_error("brute-force posterior: degenerate likelihood");
    for (double& m : post.mass) m /= total;
    return post;
}

double exact_baseline_mi(const ModelSpec& spec,
                         const std::vector<std::pair<std::vector<double>, const Graph*>>& pairs) {
    double sum = 0.0;
    for (const auto& [theta, graph] : pairs) {
        BetaPosterior post;
        if (spec.id == ModelId::kRandomConnection) {
            post = posterior_random_connection(*graph);
        } else if (spec.id == ModelId::kConnectedSmallWorld) {
            post = posterior_connected_small_world(*graph, spec.ring_degree);
        } else {
            throw std::invalid_argument("exact_baseline_mi: no closed-form posterior for " + spec.name);
        }
        sum += post.log_density(theta);
    }
    return prior_entropy(spec) + sum / static_cast<double>(pairs.size());
}

}  // namespace netgrow
