#include "netgrow/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "netgrow/oracles.hpp"
#include "netgrow/serialize.hpp"

namespace netgrow {

namespace {

std::string opt_to_json(const std::optional<double>& x) {
    return x ? format_double(*x) : "null";
}

double kahan_mean(const std::vector<double>& xs) {
    double sum = 0.0;
    double comp = 0.0;
    for (double x : xs) {
        double y = x - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum / static_cast<double>(xs.size());
}

}  // namespace

std::string EvalReport::to_json() const {
    std::string out = "{\"model\":\"" + model + "\"";
    out += ",\"gin_layers\":" + std::to_string(gin_layers);
    out += ",\"mi\":" + format_double(mi);
    out += ",\"ci_lo\":" + (ci ? format_double(ci->lo) : "null");
    out += ",\"ci_hi\":" + (ci ? format_double(ci->hi) : "null");
    out += ",\"ci_se\":" + (ci ? format_double(ci->se) : "null");
    out += ",\"test_nll\":" + format_double(test_nll);
    out += ",\"prior_entropy\":" + format_double(prior_entropy);
    out += ",\"eval_seconds\":" + format_double(eval_seconds);
    out += ",\"baseline\":" + opt_to_json(baseline);
    out += "}";
    return out;
}

EvalReport mutual_information(Checkpoint& checkpoint, const Dataset& test_set) {
    if (test_set.empty()) throw std::invalid_argument("mutual_information: empty test set");
    const ModelSpec& spec = registry(checkpoint.model);
    for (const auto& ex : test_set) {
        if (static_cast<int>(ex.theta.size()) != spec.param_count) {
            throw std::invalid_argument(
                "mutual_information: test thetas do not match model \"" + checkpoint.model + "\"");
        }
    }

    EvalReport report;
    report.model = checkpoint.model;
    report.gin_layers = checkpoint.config.gin_layers;
    report.prior_entropy = prior_entropy(spec);

    std::vector<const Graph*> graphs;
    std::vector<std::vector<double>> thetas;
    graphs.reserve(test_set.size());
    for (const auto& ex : test_set) {
        graphs.push_back(&ex.graph);
        thetas.push_back(ex.theta);
    }
    auto t0 = std::chrono::steady_clock::now();
    report.per_graph_logp = nde_log_probs(checkpoint.params, checkpoint.config, graphs, thetas);
    auto t1 = std::chrono::steady_clock::now();
    report.eval_seconds = std::chrono::duration<double>(t1 - t0).count();

    report.test_nll = -kahan_mean(report.per_graph_logp);
    report.mi = report.prior_entropy - report.test_nll;

    if (spec.id == ModelId::kRandomConnection || spec.id == ModelId::kConnectedSmallWorld) {
        std::vector<std::pair<std::vector<double>, const Graph*>> pairs;
        pairs.reserve(test_set.size());
        for (const auto& ex : test_set) pairs.emplace_back(ex.theta, &ex.graph);
        report.baseline = exact_baseline_mi(spec, pairs);
    }
    return report;
}

BootstrapCI bootstrap_ci(const std::vector<double>& per_graph_logp, double prior_entropy,
                         int resamples, std::uint64_t seed) {
    if (per_graph_logp.size() < 2) {
        throw std::invalid_argument("bootstrap_ci: need at least two observations");
    }
    if (resamples < 2) throw std::invalid_argument("bootstrap_ci: need at least two resamples");
    std::size_t n = per_graph_logp.size();
    RngStream rng(derive_seed(seed, 0xB007));
    std::vector<double> stats(resamples);
    for (int r = 0; r < resamples; ++r) {
        double sum = 0.0;
        double comp = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double x = per_graph_logp[rng.uniform_int(n)];
            double y = x - comp;
            double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        stats[r] = prior_entropy + sum / static_cast<double>(n);
    }
    std::sort(stats.begin(), stats.end());
    auto quantile = [&](double q) {
        double pos = q * (resamples - 1);
        std::size_t lo = static_cast<std::size_t>(pos);
        std::size_t hi = std::min<std::size_t>(lo + 1, resamples - 1);
        double frac = pos - static_cast<double>(lo);
        return stats[lo] * (1.0 - frac) + stats[hi] * frac;
    };
    BootstrapCI ci;
    ci.lo = quantile(0.025);
    ci.hi = quantile(0.975);
    double mean = kahan_mean(stats);
    double var = 0.0;
    for (double s : stats) var += (s - mean) * (s - mean);
    ci.se = std::sqrt(var / static_cast<double>(resamples - 1));
    return ci;
}

double eval_timing(Checkpoint& checkpoint, const Dataset& test_set) {
    EvalReport report = mutual_information(checkpoint, test_set);
    return report.eval_seconds;
}

namespace {

struct SweepRow {
    std::string model;
    int depth;
};

std::vector<SweepRow> existing_rows(const std::string& path) {
    std::vector<SweepRow> rows;
    std::ifstream in(path);
    if (!in) return rows;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        std::istringstream ss(line);
        std::string model, depth;
        if (std::getline(ss, model, ',') && std::getline(ss, depth, ',')) {
            try {
                rows.push_back({model, std::stoi(depth)});
            } catch (const std::exception&) {
            }
        }
    }
    return rows;
}

}  // namespace

void depth_sweep(const TrainConfig& base_config, const SweepOptions& options,
                 const std::string& csv_path) {
    base_config.validate();
    if (options.depths.empty()) throw std::invalid_argument("depth_sweep: no depths requested");
    const ModelSpec& spec = registry(base_config.model);

    std::vector<SweepRow> done = options.resume ? existing_rows(csv_path) : std::vector<SweepRow>{};
    bool fresh = done.empty();
    std::ofstream out;
    if (fresh) {
        out.open(csv_path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + csv_path + " for writing");
        out << "model,depth,mi,ci_lo,ci_hi,baseline,receptive_field,test_nll,prior_entropy,"
               "eval_seconds\n";
    } else {
        out.open(csv_path, std::ios::binary | std::ios::app);
        if (!out) throw std::runtime_error("cannot open " + csv_path + " for appending");
    }

    Dataset train_set = sample_dataset(spec, base_config.train_count, base_config.nodes,
                                       derive_seed(base_config.seed, 1));
    Dataset val_set = sample_dataset(spec, base_config.val_count, base_config.nodes,
                                     derive_seed(base_config.seed, 2));
    Dataset test_set = sample_dataset(spec, base_config.test_count, base_config.nodes,
                                      derive_seed(base_config.seed, 3));

    for (int depth : options.depths) {
        bool skip = false;
        for (const auto& row : done) {
            if (row.model == base_config.model && row.depth == depth) skip = true;
        }
        if (skip) continue;

        TrainConfig config = base_config;
        config.gin_layers = depth;
        Checkpoint ckpt = train(config, train_set, val_set);
        EvalReport report = mutual_information(ckpt, test_set);
        report.ci = bootstrap_ci(report.per_graph_logp, report.prior_entropy,
                                 options.bootstrap_resamples, options.bootstrap_seed);

        if (!options.checkpoint_dir.empty()) {
            save_checkpoint(ckpt, options.checkpoint_dir + "/" + base_config.model + "_depth" +
                                      std::to_string(depth) + ".ckpt.json");
        }

        out << base_config.model << ',' << depth << ',' << format_double(report.mi) << ','
            << format_double(report.ci->lo) << ',' << format_double(report.ci->hi) << ','
            << (report.baseline ? format_double(*report.baseline) : "") << ','
            << (spec.localization ? std::to_string(2 * *spec.localization + 1) : "") << ','
            << format_double(report.test_nll) << ',' << format_double(report.prior_entropy) << ','
            << format_double(report.eval_seconds) << '\n';
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + csv_path);
    }
}

}  // namespace netgrow
