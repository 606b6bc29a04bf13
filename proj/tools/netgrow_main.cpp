// netgrow — simulate growing-network models, train and evaluate neural
// posterior estimators, and query exact posterior oracles.
//
// Exit codes: 0 success, 1 I/O failure, 2 usage or validation error,
// 3 numeric failure during training.
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "netgrow/evaluation.hpp"
#include "netgrow/oracles.hpp"
#include "netgrow/serialize.hpp"
#include "netgrow/training.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
    if (const char* env = std::getenv("NETGROW_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw CLI::ValidationError("NETGROW_SEED", "must be an unsigned integer");
        }
    }
    return 0;
}

netgrow::Dataset load_dataset_or_io_error(const std::string& path) {
    try {
        return netgrow::load_dataset(path);
    } catch (const netgrow::ParseError& e) {
        throw IoError(path + ": " + e.what());
    } catch (const std::runtime_error& e) {
        throw IoError(e.what());
    }
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

// Optional JSON config file whose keys mirror the long flag names. Flags
// given on the command line override the file.
void apply_config_file(CLI::App& app, const std::string& path,
                       const std::vector<std::string>& args) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path + ": malformed config: " + e.what());
    }
    if (!j.is_object()) throw IoError(path + ": config must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        std::string flag = "--" + it.key();
        CLI::Option* opt = app.get_option_no_throw(flag);
        if (!opt) throw CLI::ValidationError("--config", "unknown key \"" + it.key() + "\"");
        if (std::find(args.begin(), args.end(), flag) != args.end()) continue;
        std::string text = it.value().is_string() ? it.value().get<std::string>() : it.value().dump();
        opt->add_result(text);
    }
}

int run_simulate(const std::string& model, int n, int count, std::uint64_t seed,
                 const std::string& out_path) {
    const netgrow::ModelSpec& spec = netgrow::registry(model);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot open " + out_path + " for writing");
    double edge_sum = 0.0;
    for (int i = 0; i < count; ++i) {
        netgrow::RngStream rng = netgrow::RngStream::split(seed, static_cast<std::uint64_t>(i));
        netgrow::ModelParams params = netgrow::sample_prior(spec, rng);
        netgrow::SimResult sim = netgrow::simulate(spec, params.theta, n, rng, false);
        edge_sum += static_cast<double>(sim.graph.num_edges());
        out << netgrow::serialize_graph(sim.graph, params.theta) << '\n';
    }
    if (!out) throw IoError("write failed: " + out_path);
    double mean_edges = edge_sum / count;
    std::cerr << "simulated " << count << " " << model << " graphs (n=" << n << ") to " << out_path
              << "; mean |E| = " << mean_edges << ", mean degree = " << 2.0 * mean_edges / n
              << "\n";
    return kExitOk;
}

int run_train(netgrow::TrainConfig config, const std::string& train_path,
              const std::string& val_path, const std::string& ckpt_path,
              const std::string& metrics_path) {
    config.validate();
    netgrow::Dataset train_set = load_dataset_or_io_error(train_path);
    netgrow::Dataset val_set = load_dataset_or_io_error(val_path);
    netgrow::Checkpoint ckpt;
    try {
        ckpt = netgrow::train(config, train_set, val_set);
    } catch (const std::runtime_error& e) {
        throw NumericError(e.what());
    }
    try {
        netgrow::save_checkpoint(ckpt, ckpt_path);
        if (!metrics_path.empty()) netgrow::write_metrics_csv(metrics_path, ckpt.curve);
    } catch (const std::runtime_error& e) {
        throw IoError(e.what());
    }
    std::cerr << "best validation loss " << ckpt.best_val << " (restart " << ckpt.restart
              << ", epoch " << ckpt.best_epoch << ") -> " << ckpt_path << "\n";
    return kExitOk;
}

int run_eval(const std::string& ckpt_path, const std::string& test_path, int resamples,
             std::uint64_t seed, const std::string& out_path) {
    netgrow::Checkpoint ckpt;
    try {
        ckpt = netgrow::load_checkpoint(ckpt_path);
    } catch (const std::runtime_error& e) {
        throw IoError(e.what());
    }
    netgrow::Dataset test_set = load_dataset_or_io_error(test_path);
    netgrow::EvalReport report = netgrow::mutual_information(ckpt, test_set);
    if (resamples > 0) {
        report.ci = netgrow::bootstrap_ci(report.per_graph_logp, report.prior_entropy, resamples,
                                          seed);
    }
    std::string json = report.to_json();
    if (!out_path.empty()) {
        write_text(out_path, json + "\n");
    }
    std::cout << json << "\n";
    return kExitOk;
}

std::vector<int> parse_depths(const std::string& text) {
    std::vector<int> depths;
    auto fail = [&]() {
        throw CLI::ValidationError("--depths", "expected a:b or a comma-separated list");
    };
    if (text.find(':') != std::string::npos) {
        auto pos = text.find(':');
        try {
            int lo = std::stoi(text.substr(0, pos));
            int hi = std::stoi(text.substr(pos + 1));
            if (lo > hi) fail();
            for (int d = lo; d <= hi; ++d) depths.push_back(d);
        } catch (const std::exception&) {
            fail();
        }
        return depths;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        std::string tok = text.substr(start, comma == std::string::npos ? comma : comma - start);
        try {
            depths.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            fail();
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (depths.empty()) fail();
    return depths;
}

int run_sweep(const netgrow::TrainConfig& config, const std::string& depths_text,
              const std::string& csv_path, const std::string& checkpoint_dir, int resamples) {
    netgrow::SweepOptions options;
    options.depths = parse_depths(depths_text);
    options.bootstrap_resamples = resamples;
    options.bootstrap_seed = config.seed;
    options.checkpoint_dir = checkpoint_dir;
    for (int d : options.depths) {
        if (d < 0 || d > config.total_layers) {
            throw CLI::ValidationError("--depths", "depths must lie in [0, total depth]");
        }
    }
    try {
        netgrow::depth_sweep(config, options, csv_path);
    } catch (const std::runtime_error& e) {
        throw NumericError(e.what());
    }
    std::cerr << "sweep rows written to " << csv_path << "\n";
    return kExitOk;
}

int run_oracle(const std::string& model, const std::string& graph_path,
               const std::string& out_path) {
    std::ifstream in(graph_path);
    if (!in) throw IoError("cannot open " + graph_path);
    std::string line;
    do {
        if (!std::getline(in, line)) throw IoError(graph_path + ": no graph record found");
    } while (line.empty());
    netgrow::GraphRecord rec;
    try {
        rec = netgrow::parse_graph_record(line, 1);
    } catch (const netgrow::ParseError& e) {
        throw IoError(graph_path + ": " + e.what());
    }

    std::string json;
    if (model == "random_connection") {
        json = netgrow::posterior_random_connection(rec.graph).to_json();
    } else if (model == "connected_small_world") {
        const auto& spec = netgrow::registry("connected_small_world");
        json = netgrow::posterior_connected_small_world(rec.graph, spec.ring_degree).to_json();
    } else if (model == "redirection_bruteforce") {
        const auto& spec = netgrow::registry("redirection");
        json = netgrow::bruteforce_posterior_redirection(rec.graph, spec.prior).to_json();
    } else {
        throw CLI::ValidationError(
            "--model",
            "oracle models: random_connection, connected_small_world, redirection_bruteforce");
    }
    if (!out_path.empty()) write_text(out_path, json + "\n");
    std::cout << json << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"growing-network simulators and amortized posterior inference"};
    app.require_subcommand(1);

    std::string config_path;

    // simulate
    auto* sim = app.add_subcommand("simulate", "sample prior-predictive graphs to JSON lines");
    std::string sim_model, sim_out;
    int sim_n = 200, sim_count = 1;
    std::uint64_t sim_seed = 0;
    sim->add_option("--config", config_path, "JSON config file with flag defaults");
    sim->add_option("--model", sim_model, "model name")->required();
    sim->add_option("--n", sim_n, "nodes per graph");
    sim->add_option("--count", sim_count, "number of graphs");
    sim->add_option("--seed", sim_seed, "master seed");
    sim->add_option("--out", sim_out, "output path")->required();

    // train
    auto* tr = app.add_subcommand("train", "train a neural density estimator");
    netgrow::TrainConfig tcfg;
    std::string tr_train, tr_val, tr_out, tr_metrics;
    tr->add_option("--config", config_path, "JSON config file with flag defaults");
    tr->add_option("--model", tcfg.model, "model name")->required();
    tr->add_option("--depth", tcfg.gin_layers, "GIN layer count");
    tr->add_option("--total-depth", tcfg.total_layers, "total layer budget");
    tr->add_option("--width", tcfg.width, "feature width");
    tr->add_option("--hidden", tcfg.hidden, "MLP hidden units");
    tr->add_option("--batch", tcfg.batch_size, "minibatch size");
    tr->add_option("--lr", tcfg.lr0, "initial learning rate");
    tr->add_option("--lr-patience", tcfg.lr_patience, "epochs of validation stall before halving");
    tr->add_option("--stop-patience", tcfg.stop_patience, "epochs of validation stall before stopping");
    tr->add_option("--restarts", tcfg.restarts, "independent training restarts");
    tr->add_option("--max-epochs", tcfg.max_epochs, "hard epoch cap");
    tr->add_option("--seed", tcfg.seed, "master seed");
    tr->add_option("--train", tr_train, "training dataset (JSON lines)")->required();
    tr->add_option("--val", tr_val, "validation dataset (JSON lines)")->required();
    tr->add_option("--out", tr_out, "checkpoint output path")->required();
    tr->add_option("--metrics", tr_metrics, "per-epoch metrics CSV");

    // eval
    auto* ev = app.add_subcommand("eval", "score a checkpoint on a test set");
    std::string ev_ckpt, ev_test, ev_out;
    int ev_bootstrap = 1000;
    std::uint64_t ev_seed = 0;
    ev->add_option("--config", config_path, "JSON config file with flag defaults");
    ev->add_option("--checkpoint", ev_ckpt, "checkpoint path")->required();
    ev->add_option("--test", ev_test, "test dataset")->required();
    ev->add_option("--bootstrap", ev_bootstrap, "bootstrap resamples (0 disables the CI)");
    ev->add_option("--seed", ev_seed, "bootstrap seed");
    ev->add_option("--out", ev_out, "also write the report JSON here");

    // sweep
    auto* sw = app.add_subcommand("sweep", "train and evaluate across GIN depths");
    netgrow::TrainConfig scfg;
    std::string sw_depths = "0:5", sw_out, sw_ckpt_dir;
    int sw_bootstrap = 1000;
    sw->add_option("--config", config_path, "JSON config file with flag defaults");
    sw->add_option("--model", scfg.model, "model name")->required();
    sw->add_option("--depths", sw_depths, "a:b range or comma list of GIN depths");
    sw->add_option("--n", scfg.nodes, "nodes per graph");
    sw->add_option("--train-count", scfg.train_count, "training graphs");
    sw->add_option("--val-count", scfg.val_count, "validation graphs");
    sw->add_option("--test-count", scfg.test_count, "test graphs");
    sw->add_option("--batch", scfg.batch_size, "minibatch size");
    sw->add_option("--lr", scfg.lr0, "initial learning rate");
    sw->add_option("--lr-patience", scfg.lr_patience, "epochs before halving");
    sw->add_option("--stop-patience", scfg.stop_patience, "epochs before stopping");
    sw->add_option("--restarts", scfg.restarts, "training restarts per depth");
    sw->add_option("--max-epochs", scfg.max_epochs, "hard epoch cap");
    sw->add_option("--total-depth", scfg.total_layers, "total layer budget");
    sw->add_option("--seed", scfg.seed, "master seed");
    sw->add_option("--bootstrap", sw_bootstrap, "bootstrap resamples");
    sw->add_option("--out", sw_out, "output CSV")->required();
    sw->add_option("--checkpoint-dir", sw_ckpt_dir, "keep per-depth checkpoints here");

    // oracle
    auto* orc = app.add_subcommand("oracle", "exact posterior for a serialized graph");
    std::string orc_model, orc_graph, orc_out;
    orc->add_option("--config", config_path, "JSON config file with flag defaults");
    orc->add_option("--model", orc_model, "oracle name")->required();
    orc->add_option("--graph", orc_graph, "graph record file")->required();
    orc->add_option("--out", orc_out, "also write the posterior JSON here");

    try {
        // Two-phase parse so a config file can supply defaults.
        std::vector<std::string> args(argv + 1, argv + argc);
        for (std::size_t i = 0; i + 1 < args.size(); ++i) {
            if (args[i] == "--config") {
                CLI::App* sub = nullptr;
                for (CLI::App* candidate : {sim, tr, ev, sw, orc}) {
                    if (!args.empty() && candidate->get_name() == args[0]) sub = candidate;
                }
                if (sub) apply_config_file(*sub, args[i + 1], args);
                break;
            }
        }

        bool seed_given = false;
        for (const auto& a : args) {
            if (a == "--seed") seed_given = true;
        }
        app.parse(argc, argv);
        if (!seed_given) {
            std::uint64_t env_seed = default_seed();
            if (sim_seed == 0) sim_seed = env_seed;
            if (tcfg.seed == 0) tcfg.seed = env_seed;
            if (ev_seed == 0) ev_seed = env_seed;
            if (scfg.seed == 0) scfg.seed = env_seed;
        }

        if (sim->parsed()) return run_simulate(sim_model, sim_n, sim_count, sim_seed, sim_out);
        if (tr->parsed()) return run_train(tcfg, tr_train, tr_val, tr_out, tr_metrics);
        if (ev->parsed()) return run_eval(ev_ckpt, ev_test, ev_bootstrap, ev_seed, ev_out);
        if (sw->parsed()) return run_sweep(scfg, sw_depths, sw_out, sw_ckpt_dir, sw_bootstrap);
        if (orc->parsed()) return run_oracle(orc_model, orc_graph, orc_out);
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "netgrow: " << e.what() << "\n";
        return kExitIo;
    } catch (const NumericError& e) {
        std::cerr << "netgrow: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "netgrow: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "netgrow: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "netgrow: " << e.what() << "\n";
        return kExitIo;
    }
}
