// oracles.hpp — ground-truth inference: closed-form posteriors, factorized
// history likelihoods, and brute-force marginal posteriors for tiny trees.
#ifndef NETGROW_ORACLES_HPP_
#define NETGROW_ORACLES_HPP_

#include <string>
#include <vector>

#include "netgrow/graph.hpp"
#include "netgrow/models.hpp"

namespace netgrow {

struct BetaPosterior {
    std::vector<BetaParams> components;

    double log_density(const std::vector<double>& theta) const;
    std::vector<double> means() const;
    std::string to_json() const;
};

// Normalized posterior on a theta grid in (0, 1).
struct GridPosterior {
    std::vector<double> grid;
    std::vector<double> mass;

    double mean() const;
    std::string to_json() const;
};

// theta | G ~ Beta(1 + |E|, n - |E|).
BetaPosterior posterior_random_connection(const Graph& g);

// theta | G ~ Beta(1 + s, 1 + nz/2 - s) with s = |E| - nz/2 shortcut edges.
BetaPosterior posterior_connected_small_world(const Graph& g, int z);

// Log likelihood of a recorded history with the per-step seed marginalized
// uniformly over the pre-step nodes. Supports redirection and copying.
double history_log_likelihood(ModelId model, const History& history,
                              const std::vector<double>& theta);

// Marginal posterior of the redirection parameter for a tree with n <= 8,
// summing the factorized likelihood over all consistent node orderings.
GridPosterior bruteforce_posterior_redirection(const Graph& g, const Prior& prior,
                                               int grid_points = 201);

// H[pi] + mean log posterior density at the true theta, over (theta, G) pairs.
double exact_baseline_mi(const ModelSpec& spec,
                         const std::vector<std::pair<std::vector<double>, const Graph*>>& pairs);

}  // namespace netgrow

#endif  // NETGROW_ORACLES_HPP_
