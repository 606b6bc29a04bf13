// nde.hpp — the neural density estimator: GIN layers with weighted
// shortcuts, mean pooling, dense residual layers, and a beta head.
#ifndef NETGROW_NDE_HPP_
#define NETGROW_NDE_HPP_

#include <string>
#include <vector>

#include "netgrow/autodiff.hpp"
#include "netgrow/graph.hpp"
#include "netgrow/oracles.hpp"
#include "netgrow/rng.hpp"

namespace netgrow {

struct NDEConfig {
    int total_layers = 5;  // L; gin_layers + dense layers
    int gin_layers = 1;    // l in [0, L]
    int width = 8;         // feature width after the first layer
    int hidden = 8;        // MLP hidden units
    int param_count = 1;   // p of the target model

    int dense_layers() const { return total_layers - gin_layers; }
    void validate() const;
};

// Concentration floor added after the softplus head.
inline constexpr double kConcentrationFloor = 1e-6;

// Theta values are clamped this far inside (0, 1) before taking logs.
inline constexpr double kThetaClampNDE = 1e-12;

// Layer parameters are named layer<i>.{gamma,W1,b1,W2,b2} plus head.{W3,b3}.
// Layer 0 always has input width 1 (node features start as ones and pooled
// features are width 1 when gin_layers = 0), so the trainable parameter
// count is the same for every gin_layers choice at fixed total depth.
ParamStore init_nde_params(const NDEConfig& config, RngStream& rng);

std::size_t nde_parameter_count(const NDEConfig& config);

// b2 + tanh(b1 + X W1) W2 using the parameters of the given layer.
TapeRef nde_mlp(Tape& tape, int layer, TapeRef x);

// gamma * H + mlp((A + I) H); the shortcut broadcasts when H is width 1.
TapeRef nde_gin_layer(Tape& tape, int layer, TapeRef h, const BatchedGraph& batch, int out_width);

// gamma * xi + mlp(xi): the aggregation-free residual layer.
TapeRef nde_dense_layer(Tape& tape, int layer, TapeRef xi, int out_width);

// softplus(b3 + xi W3) plus the concentration floor.
TapeRef nde_beta_head(Tape& tape, TapeRef xi);

// Forward pass to the 2p concentration columns (alpha_1, beta_1, ...).
TapeRef nde_concentrations(Tape& tape, const NDEConfig& config, const BatchedGraph& batch);

// Hand-assigned width-1 parameters that push the closed-form small-world
// posterior through the network: layer 0 linearizes tanh to read node
// degrees, later layers propagate the mean degree unchanged, and the head
// maps it to the Beta(1 + s, 1 + nz/2 - s) concentrations for a graph with
// the given node count. Requires width = hidden = 1 and gin_layers >= 1.
ParamStore small_world_readout_params(const NDEConfig& config, int nodes, int ring_degree,
                                      double epsilon);

struct NDELoss {
    TapeRef loss;              // 1x1: mean negative log probability
    TapeRef per_graph_logp;    // G x 1
};

// thetas is row-major G x p, matching the batch's graph order.
NDELoss nde_nll_loss(Tape& tape, const NDEConfig& config, const BatchedGraph& batch,
                     const std::vector<std::vector<double>>& thetas);

// Convenience single-graph posterior (no gradient use).
BetaPosterior nde_posterior(ParamStore& params, const NDEConfig& config, const Graph& g);

// Batched per-graph log probabilities without building a loss.
std::vector<double> nde_log_probs(ParamStore& params, const NDEConfig& config,
                                  const std::vector<const Graph*>& graphs,
                                  const std::vector<std::vector<double>>& thetas);

// Plain beta mixture log density (the non-tape twin of the training loss).
double log_prob(const std::vector<double>& theta, const BetaPosterior& posterior);

}  // namespace netgrow

#endif  // NETGROW_NDE_HPP_
