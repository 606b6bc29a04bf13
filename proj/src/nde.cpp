#include "netgrow/nde.hpp"

#include <cmath>
#include <stdexcept>

#include "netgrow/special.hpp"

namespace netgrow {

void NDEConfig::validate() const {
    if (total_layers < 1) throw std::invalid_argument("NDEConfig: total_layers must be >= 1");
    if (gin_layers < 0 || gin_layers > total_layers) {
        throw std::invalid_argument("NDEConfig: gin_layers must lie in [0, total_layers]");
    }
    if (width < 1 || hidden < 1 || param_count < 1) {
        throw std::invalid_argument("NDEConfig: width, hidden and param_count must be >= 1");
    }
}

namespace {

std::string layer_prefix(int i) { return "layer" + std::to_string(i) + "."; }

Tensor glorot(int rows, int cols, RngStream& rng) {
    Tensor t(rows, cols);
    double a = std::sqrt(6.0 / (rows + cols));
    for (double& x : t.v) x = (2.0 * rng.uniform() - 1.0) * a;
    return t;
}

}  // namespace

ParamStore init_nde_params(const NDEConfig& config, RngStream& rng) {
    config.validate();
    ParamStore store;
    for (int i = 0; i < config.total_layers; ++i) {
        int in = i == 0 ? 1 : config.width;
        std::string p = layer_prefix(i);
        store.add(p + "gamma", Tensor::scalar(1.0));
        store.add(p + "W1", glorot(in, config.hidden, rng));
        store.add(p + "b1", Tensor(1, config.hidden));
        store.add(p + "W2", glorot(config.hidden, config.width, rng));
        store.add(p + "b2", Tensor(1, config.width));
    }
    store.add("head.W3", glorot(config.width, 2 * config.param_count, rng));
    store.add("head.b3", Tensor(1, 2 * config.param_count));
    return store;
}

std::size_t nde_parameter_count(const NDEConfig& config) {
    config.validate();
    std::size_t total = 0;
    for (int i = 0; i < config.total_layers; ++i) {
        std::size_t in = i == 0 ? 1 : config.width;
        total += 1 + in * config.hidden + config.hidden +
                 static_cast<std::size_t>(config.hidden) * config.width + config.width;
    }
    total += static_cast<std::size_t>(config.width) * 2 * config.param_count +
             2 * config.param_count;
    return total;
}

TapeRef nde_mlp(Tape& tape, int layer, TapeRef x) {
    std::string p = layer_prefix(layer);
    TapeRef h = tape.add_bias_row(tape.matmul(x, tape.param(p + "W1")), tape.param(p + "b1"));
    return tape.add_bias_row(tape.matmul(tape.tanh(h), tape.param(p + "W2")),
                             tape.param(p + "b2"));
}

namespace {

TapeRef residual_combine(Tape& tape, int layer, TapeRef x, TapeRef transformed, int out_width) {
    TapeRef shortcut = x;
    if (tape.value(x).cols != out_width) shortcut = tape.broadcast_cols(x, out_width);
    return tape.add(tape.scale(tape.param(layer_prefix(layer) + "gamma"), shortcut), transformed);
}

}  // namespace

TapeRef nde_gin_layer(Tape& tape, int layer, TapeRef h, const BatchedGraph& batch, int out_width) {
    TapeRef agg = tape.sparse_aggregate(batch, h);
    return residual_combine(tape, layer, h, nde_mlp(tape, layer, agg), out_width);
}

TapeRef nde_dense_layer(Tape& tape, int layer, TapeRef xi, int out_width) {
    return residual_combine(tape, layer, xi, nde_mlp(tape, layer, xi), out_width);
}

TapeRef nde_beta_head(Tape& tape, TapeRef xi) {
    TapeRef z = tape.add_bias_row(tape.matmul(xi, tape.param("head.W3")), tape.param("head.b3"));
    return tape.shift_const(tape.softplus(z), kConcentrationFloor);
}

TapeRef nde_concentrations(Tape& tape, const NDEConfig& config, const BatchedGraph& batch) {
    config.validate();
    TapeRef h = tape.constant(Tensor::filled(batch.num_nodes, 1, 1.0));
    for (int i = 0; i < config.gin_layers; ++i) {
        h = nde_gin_layer(tape, i, h, batch, config.width);
    }
    TapeRef xi = tape.segment_mean(batch, h);
    for (int i = config.gin_layers; i < config.total_layers; ++i) {
        xi = nde_dense_layer(tape, i, xi, config.width);
    }
    return nde_beta_head(tape, xi);
}

ParamStore small_world_readout_params(const NDEConfig& config, int nodes, int ring_degree,
                                      double epsilon) {
    config.validate();
    if (config.width != 1 || config.hidden != 1 || config.param_count != 1) {
        throw std::invalid_argument("small_world_readout_params: width = hidden = p = 1 required");
    }
    if (config.gin_layers < 1) {
        throw std::invalid_argument("small_world_readout_params: needs at least one GIN layer");
    }
    ParamStore store;
    for (int i = 0; i < config.total_layers; ++i) {
        std::string p = "layer" + std::to_string(i) + ".";
        if (i == 0) {
            // tanh(eps (d+1)) / eps - 1 -> d as eps -> 0; no shortcut.
            store.add(p + "gamma", Tensor::scalar(0.0));
            store.add(p + "W1", Tensor::scalar(epsilon));
            store.add(p + "b1", Tensor(1, 1));
            store.add(p + "W2", Tensor::scalar(1.0 / epsilon));
            Tensor b2(1, 1);
            b2.v[0] = -1.0;
            store.add(p + "b2", std::move(b2));
        } else {
            // Identity: unit shortcut, zero transform.
            store.add(p + "gamma", Tensor::scalar(1.0));
            store.add(p + "W1", Tensor(1, 1));
            store.add(p + "b1", Tensor(1, 1));
            store.add(p + "W2", Tensor(1, 1));
            store.add(p + "b2", Tensor(1, 1));
        }
    }
    double n = static_cast<double>(nodes);
    double z = static_cast<double>(ring_degree);
    Tensor w3(1, 2);
    w3.at(0, 0) = 0.5 * n;
    w3.at(0, 1) = -0.5 * n;
    Tensor b3(1, 2);
    b3.at(0, 0) = 1.0 - 0.5 * n * z;
    b3.at(0, 1) = 1.0 + n * z;
    store.add("head.W3", std::move(w3));
    store.add("head.b3", std::move(b3));
    return store;
}

NDELoss nde_nll_loss(Tape& tape, const NDEConfig& config, const BatchedGraph& batch,
                     const std::vector<std::vector<double>>& thetas) {
    if (static_cast<int>(thetas.size()) != batch.num_graphs) {
        throw std::invalid_argument("nde_nll_loss: theta batch size mismatch");
    }
    int p = config.param_count;
    Tensor log_theta(batch.num_graphs, p);
    Tensor log_1m_theta(batch.num_graphs, p);
    Tensor bias(batch.num_graphs, p);
    for (int g = 0; g < batch.num_graphs; ++g) {
        if (static_cast<int>(thetas[g].size()) != p) {
            throw std::invalid_argument("nde_nll_loss: theta arity mismatch");
        }
        for (int i = 0; i < p; ++i) {
            double t = std::clamp(thetas[g][i], kThetaClampNDE, 1.0 - kThetaClampNDE);
            log_theta.at(g, i) = std::log(t);
            log_1m_theta.at(g, i) = std::log1p(-t);
            bias.at(g, i) = -log_theta.at(g, i) - log_1m_theta.at(g, i);
        }
    }

    TapeRef conc = nde_concentrations(tape, config, batch);
    TapeRef alpha = tape.slice_cols_stride(conc, 0, 2);
    TapeRef beta = tape.slice_cols_stride(conc, 1, 2);
    // lgamma(a+b) - lgamma(a) - lgamma(b) + (a-1) log t + (b-1) log(1-t)
    TapeRef lp = tape.sub(tape.lgamma(tape.add(alpha, beta)), tape.lgamma(alpha));
    lp = tape.sub(lp, tape.lgamma(beta));
    lp = tape.add(lp, tape.mul_const(alpha, log_theta));
    lp = tape.add(lp, tape.mul_const(beta, log_1m_theta));
    lp = tape.add(lp, tape.constant(std::move(bias)));

    NDELoss out;
    out.per_graph_logp = tape.row_sum(lp);
    out.loss = tape.scale_const(tape.mean_all(out.per_graph_logp), -1.0);
    return out;
}

namespace {

BetaPosterior decode_concentrations(const Tensor& conc, int row, int p) {
    BetaPosterior post;
    post.components.reserve(p);
    for (int i = 0; i < p; ++i) {
        post.components.push_back({conc.at(row, 2 * i), conc.at(row, 2 * i + 1)});
    }
    return post;
}

}  // namespace

BetaPosterior nde_posterior(ParamStore& params, const NDEConfig& config, const Graph& g) {
    BatchedGraph batch = make_batch({&g});
    Tape tape(&params);
    TapeRef conc = nde_concentrations(tape, config, batch);
    return decode_concentrations(tape.value(conc), 0, config.param_count);
}

std::vector<double> nde_log_probs(ParamStore& params, const NDEConfig& config,
                                  const std::vector<const Graph*>& graphs,
                                  const std::vector<std::vector<double>>& thetas) {
    std::vector<double> out;
    out.reserve(graphs.size());
    constexpr std::size_t kChunk = 64;
    for (std::size_t start = 0; start < graphs.size(); start += kChunk) {
        std::size_t stop = std::min(graphs.size(), start + kChunk);
        std::vector<const Graph*> chunk(graphs.begin() + start, graphs.begin() + stop);
        std::vector<std::vector<double>> chunk_thetas(thetas.begin() + start,
                                                      thetas.begin() + stop);
        BatchedGraph batch = make_batch(chunk);
        Tape tape(&params);
        NDELoss l = nde_nll_loss(tape, config, batch, chunk_thetas);
        const Tensor& lp = tape.value(l.per_graph_logp);
        out.insert(out.end(), lp.v.begin(), lp.v.end());
    }
    return out;
}

double log_prob(const std::vector<double>& theta, const BetaPosterior& posterior) {
    return posterior.log_density(theta);
}

}  // namespace netgrow
