// evaluation.hpp — variational mutual-information estimates with bootstrap
// confidence intervals, exact baselines, and the depth-sweep driver.
#ifndef NETGROW_EVALUATION_HPP_
#define NETGROW_EVALUATION_HPP_

#include <optional>
#include <string>
#include <vector>

#include "netgrow/training.hpp"

namespace netgrow {

struct BootstrapCI {
    double lo = 0.0;
    double hi = 0.0;
    double se = 0.0;
};

struct EvalReport {
    std::string model;
    int gin_layers = 0;
    double mi = 0.0;  // prior_entropy - test_nll, exactly
    std::optional<BootstrapCI> ci;
    double test_nll = 0.0;
    double prior_entropy = 0.0;
    double eval_seconds = 0.0;
    std::optional<double> baseline;  // exact-posterior MI where tractable
    std::vector<double> per_graph_logp;

    std::string to_json() const;
};

// Scores the test set under the checkpoint. Throws std::invalid_argument if
// the checkpoint's parameter arity does not match the test thetas.
EvalReport mutual_information(Checkpoint& checkpoint, const Dataset& test_set);

// Percentile bootstrap over per-graph log probabilities of I = H - L.
BootstrapCI bootstrap_ci(const std::vector<double>& per_graph_logp, double prior_entropy,
                         int resamples, std::uint64_t seed);

// Wall seconds for one full scoring pass over the test set.
double eval_timing(Checkpoint& checkpoint, const Dataset& test_set);

struct SweepOptions {
    std::vector<int> depths;  // gin layer counts
    int bootstrap_resamples = 1000;
    std::uint64_t bootstrap_seed = 0;
    bool resume = true;
    std::string checkpoint_dir;  // optional; keep per-depth checkpoints when set
};

// Trains and evaluates one row per depth, appending to a CSV with the schema
// model,depth,mi,ci_lo,ci_hi,baseline,receptive_field,test_nll,prior_entropy,
// eval_seconds. Existing (model, depth) rows are kept and skipped.
void depth_sweep(const TrainConfig& base_config, const SweepOptions& options,
                 const std::string& csv_path);

}  // namespace netgrow

#endif  // NETGROW_EVALUATION_HPP_
