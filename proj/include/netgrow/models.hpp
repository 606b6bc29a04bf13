// models.hpp — the nine mechanistic growth models: priors, simulation,
// history recording and replay.
#ifndef NETGROW_MODELS_HPP_
#define NETGROW_MODELS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "netgrow/graph.hpp"
#include "netgrow/rng.hpp"

namespace netgrow {

struct BetaParams {
    double alpha;
    double beta;
};

struct Prior {
    std::vector<BetaParams> components;  // one per model parameter
    std::size_t size() const { return components.size(); }
};

enum class ModelId {
    kRedirection,
    kDuplicationMutation,
    kCopying,
    kRandomConnection,
    kConnectedSmallWorld,
    kGrowingTree,
    kDuplicationComplementation,
    kJacksonRogers,
    kWattsStrogatz,
};

struct ModelSpec {
    std::string name;
    ModelId id;
    int param_count;           // p
    std::optional<int> localization;  // k; nullopt for non-localized models
    Prior prior;
    int ring_degree = 0;       // z, ring models only
    int m_rnd = 0;             // Jackson-Rogers
    int m_nbr = 0;
    int initial_nodes = 1;
    bool initial_edge = false;  // start from a single edge instead of isolated nodes
    int min_nodes = 1;          // smallest valid target size
};

// Canonical specs, keyed by name. Throws std::invalid_argument on unknown names.
const ModelSpec& registry(const std::string& name);
const std::vector<std::string>& model_names();

struct ModelParams {
    std::vector<double> theta;
};

struct HistoryStep {
    node_t source = -1;
    NodeSet seeds;
    std::vector<Edge> added;
    std::vector<Edge> removed;
};

struct History {
    Graph initial;
    std::vector<HistoryStep> steps;
};

struct SimResult {
    Graph graph;
    History history;
};

// Draws each component independently from its beta prior. Values are clamped
// to [1e-12, 1 - 1e-12] so downstream log densities stay finite.
ModelParams sample_prior(const ModelSpec& spec, RngStream& rng);

// Sum of per-component beta log densities; -inf outside the open unit cube.
double prior_log_density(const ModelSpec& spec, const std::vector<double>& theta);

// Analytic differential entropy of the prior, in nats.
double prior_entropy(const ModelSpec& spec);

// Grows a graph with exactly n nodes. Deterministic given (spec, theta, n,
// stream state). Set record_history = false to skip step bookkeeping.
SimResult simulate(const ModelSpec& spec, const std::vector<double>& theta, int n,
                   RngStream& rng, bool record_history = true);

// Applies the recorded steps to the initial graph.
Graph replay(const History& history);

}  // namespace netgrow

#endif  // NETGROW_MODELS_HPP_
