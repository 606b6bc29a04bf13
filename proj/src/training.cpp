#include "netgrow/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "netgrow/serialize.hpp"

namespace netgrow {

NDEConfig TrainConfig::nde_config() const {
    NDEConfig c;
    c.total_layers = total_layers;
    c.gin_layers = gin_layers;
    c.width = width;
    c.hidden = hidden;
    c.param_count = registry(model).param_count;
    return c;
}

void TrainConfig::validate() const {
    registry(model);
    nde_config().validate();
    if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    if (train_count < batch_size) {
        throw std::invalid_argument("TrainConfig: train_count must be >= batch_size");
    }
    if (val_count < 1 || test_count < 0) throw std::invalid_argument("TrainConfig: bad dataset sizes");
    if (lr_patience < 1 || stop_patience < 1) {
        throw std::invalid_argument("TrainConfig: patience values must be positive");
    }
    if (restarts < 1) throw std::invalid_argument("TrainConfig: restarts must be >= 1");
    if (!(lr0 > 0.0)) throw std::invalid_argument("TrainConfig: lr0 must be positive");
}

namespace {

Example make_example(const ModelSpec& spec, int nodes, std::uint64_t seed, std::uint64_t index) {
    RngStream stream = RngStream::split(seed, index);
    ModelParams params = sample_prior(spec, stream);
    SimResult sim = simulate(spec, params.theta, nodes, stream, /*record_history=*/false);
    return Example{std::move(params.theta), std::move(sim.graph)};
}

}  // namespace

void generate_dataset(const ModelSpec& spec, int count, int nodes, std::uint64_t seed,
                      const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    for (int i = 0; i < count; ++i) {
        Example ex = make_example(spec, nodes, seed, static_cast<std::uint64_t>(i));
        out << serialize_graph(ex.graph, ex.theta) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Dataset sample_dataset(const ModelSpec& spec, int count, int nodes, std::uint64_t seed) {
    Dataset data;
    data.reserve(count);
    for (int i = 0; i < count; ++i) {
        data.push_back(make_example(spec, nodes, seed, static_cast<std::uint64_t>(i)));
    }
    return data;
}

Dataset load_dataset(const std::string& path) {
    Dataset data;
    for (auto& rec : read_records_file(path)) {
        if (rec.theta.empty()) {
            throw std::runtime_error(path + ": dataset records must carry \"theta\"");
        }
        data.push_back(Example{std::move(rec.theta), std::move(rec.graph)});
    }
    return data;
}

EarlyStopper::Decision EarlyStopper::observe(double val_loss) {
    ++epoch_;
    Decision d;
    if (val_loss < best_ - tol_) {
        best_ = val_loss;
        best_epoch_ = epoch_;
        since_improve_lr_ = 0;
        since_improve_stop_ = 0;
        d.improved = true;
        return d;
    }
    ++since_improve_lr_;
    ++since_improve_stop_;
    if (since_improve_stop_ >= stop_patience_) {
        d.stop = true;
        return d;
    }
    if (since_improve_lr_ >= lr_patience_) {
        d.halve = true;
        since_improve_lr_ = 0;
    }
    return d;
}

double dataset_nll(ParamStore& params, const NDEConfig& config, const Dataset& data) {
    if (data.empty()) throw std::invalid_argument("dataset_nll: empty dataset");
    std::vector<const Graph*> graphs;
    std::vector<std::vector<double>> thetas;
    graphs.reserve(data.size());
    thetas.reserve(data.size());
    for (const auto& ex : data) {
        graphs.push_back(&ex.graph);
        thetas.push_back(ex.theta);
    }
    std::vector<double> logp = nde_log_probs(params, config, graphs, thetas);
    double sum = 0.0;
    double comp = 0.0;
    for (double lp : logp) {
        double y = lp - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return -sum / static_cast<double>(logp.size());
}

namespace {

struct RestartOutcome {
    bool ok = false;
    std::string error;
    ParamStore params;
    std::vector<EpochRecord> curve;
    double best_val = std::numeric_limits<double>::infinity();
    int best_epoch = -1;
};

RestartOutcome run_restart(const TrainConfig& config, const NDEConfig& nde, const Dataset& train_set,
                           const Dataset& val_set, int restart) {
    RestartOutcome out;
    RngStream init_stream(derive_seed(config.seed, 0xA001, static_cast<std::uint64_t>(restart)));
    ParamStore params = init_nde_params(nde, init_stream);
    ParamStore best_params = params;

    double lr = config.lr0;
    EarlyStopper stopper(config.lr_patience, config.stop_patience, config.improve_tol);
    std::vector<int> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);

    try {
        for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
            RngStream shuffle_stream(derive_seed(config.seed, 0xA0020000ull + restart,
                                                 static_cast<std::uint64_t>(epoch)));
            for (std::size_t i = order.size(); i > 1; --i) {
                std::size_t j = shuffle_stream.uniform_int(i);
                std::swap(order[i - 1], order[j]);
            }

            double train_loss_sum = 0.0;
            std::size_t seen = 0;
            for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
                std::size_t stop = std::min(order.size(), start + config.batch_size);
                std::vector<const Graph*> graphs;
                std::vector<std::vector<double>> thetas;
                graphs.reserve(stop - start);
                for (std::size_t k = start; k < stop; ++k) {
                    graphs.push_back(&train_set[order[k]].graph);
                    thetas.push_back(train_set[order[k]].theta);
                }
                BatchedGraph batch = make_batch(graphs);
                Tape tape(&params);
                NDELoss loss = nde_nll_loss(tape, nde, batch, thetas);
                tape.backward(loss.loss);
                adam_step(params, lr);
                train_loss_sum += tape.scalar(loss.loss) * static_cast<double>(stop - start);
                seen += stop - start;
            }
            double train_loss = train_loss_sum / static_cast<double>(seen);
            double val_loss = dataset_nll(params, nde, val_set);
            if (!std::isfinite(train_loss) || !std::isfinite(val_loss)) {
                throw std::runtime_error("non-finite loss at epoch " + std::to_string(epoch));
            }
            out.curve.push_back({epoch, train_loss, val_loss, lr});

            EarlyStopper::Decision d = stopper.observe(val_loss);
            if (d.improved) best_params = params;
            if (d.halve) lr *= 0.5;
            if (d.stop) break;
        }
    } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
        return out;
    }

    out.ok = true;
    out.params = std::move(best_params);
    out.best_val = stopper.best();
    out.best_epoch = stopper.best_epoch();
    return out;
}

}  // namespace

Checkpoint train(const TrainConfig& config, const Dataset& train_set, const Dataset& val_set) {
    config.validate();
    if (train_set.empty() || val_set.empty()) {
        throw std::invalid_argument("train: train and validation sets must be nonempty");
    }
    NDEConfig nde = config.nde_config();

    Checkpoint best;
    best.model = config.model;
    best.config = nde;
    best.seed = config.seed;
    bool have_winner = false;
    std::string last_error;

    for (int r = 0; r < config.restarts; ++r) {
        RestartOutcome outcome = run_restart(config, nde, train_set, val_set, r);
        if (!outcome.ok) {
            last_error = outcome.error;
            std::cerr << "netgrow: restart " << r << " aborted: " << outcome.error << "\n";
            continue;
        }
        if (!have_winner || outcome.best_val < best.best_val) {
            have_winner = true;
            best.params = std::move(outcome.params);
            best.curve = std::move(outcome.curve);
            best.best_val = outcome.best_val;
            best.best_epoch = outcome.best_epoch;
            best.restart = r;
        }
    }
    if (!have_winner) {
        throw std::runtime_error("train: every restart aborted; last error: " + last_error);
    }
    return best;
}

namespace {

nlohmann::json tensor_to_json(const Tensor& t) {
    nlohmann::json j;
    j["shape"] = {t.rows, t.cols};
    j["values"] = t.v;
    return j;
}

Tensor tensor_from_json(const nlohmann::json& j) {
    Tensor t(j.at("shape").at(0).get<int>(), j.at("shape").at(1).get<int>());
    const auto& values = j.at("values");
    if (values.size() != t.v.size()) throw std::runtime_error("checkpoint: tensor size mismatch");
    for (std::size_t i = 0; i < t.v.size(); ++i) t.v[i] = values.at(i).get<double>();
    return t;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    nlohmann::json j;
    j["version"] = ckpt.version;
    j["model"] = ckpt.model;
    j["seed"] = ckpt.seed;
    j["restart"] = ckpt.restart;
    j["best_val"] = ckpt.best_val;
    j["best_epoch"] = ckpt.best_epoch;
    j["config"] = {{"total_layers", ckpt.config.total_layers},
                   {"gin_layers", ckpt.config.gin_layers},
                   {"width", ckpt.config.width},
                   {"hidden", ckpt.config.hidden},
                   {"param_count", ckpt.config.param_count}};
    nlohmann::json params = nlohmann::json::object();
    nlohmann::json adam_m = nlohmann::json::object();
    nlohmann::json adam_v = nlohmann::json::object();
    ParamStore& store = const_cast<ParamStore&>(ckpt.params);
    for (const std::string& name : store.names()) {
        int i = store.index_of(name);
        params[name] = tensor_to_json(store.value(i));
        adam_m[name] = store.adam_m(i).v;
        adam_v[name] = store.adam_v(i).v;
    }
    j["params"] = std::move(params);
    j["optimizer"] = {{"step", store.step_count()}, {"m", std::move(adam_m)}, {"v", std::move(adam_v)}};
    nlohmann::json curve = nlohmann::json::array();
    for (const auto& rec : ckpt.curve) {
        curve.push_back({{"epoch", rec.epoch},
                         {"train_loss", rec.train_loss},
                         {"val_loss", rec.val_loss},
                         {"lr", rec.lr}});
    }
    j["curve"] = std::move(curve);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << j.dump() << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + ": malformed checkpoint: " + e.what());
    }
    Checkpoint ckpt;
    ckpt.version = j.at("version").get<int>();
    if (ckpt.version != 1) throw std::runtime_error(path + ": unsupported checkpoint version");
    ckpt.model = j.at("model").get<std::string>();
    ckpt.seed = j.at("seed").get<std::uint64_t>();
    ckpt.restart = j.at("restart").get<int>();
    ckpt.best_val = j.at("best_val").get<double>();
    ckpt.best_epoch = j.at("best_epoch").get<int>();
    const auto& cfg = j.at("config");
    ckpt.config.total_layers = cfg.at("total_layers").get<int>();
    ckpt.config.gin_layers = cfg.at("gin_layers").get<int>();
    ckpt.config.width = cfg.at("width").get<int>();
    ckpt.config.hidden = cfg.at("hidden").get<int>();
    ckpt.config.param_count = cfg.at("param_count").get<int>();

    const auto& params = j.at("params");
    const auto& opt = j.at("optimizer");
    for (auto it = params.begin(); it != params.end(); ++it) {
        int i = ckpt.params.add(it.key(), tensor_from_json(it.value()));
        const auto& m = opt.at("m").at(it.key());
        const auto& v = opt.at("v").at(it.key());
        Tensor& tm = ckpt.params.adam_m(i);
        Tensor& tv = ckpt.params.adam_v(i);
        if (m.size() != tm.v.size() || v.size() != tv.v.size()) {
            throw std::runtime_error(path + ": optimizer state size mismatch");
        }
        for (std::size_t k = 0; k < tm.v.size(); ++k) tm.v[k] = m.at(k).get<double>();
        for (std::size_t k = 0; k < tv.v.size(); ++k) tv.v[k] = v.at(k).get<double>();
    }
    ckpt.params.set_step_count(opt.at("step").get<long>());

    for (const auto& rec : j.at("curve")) {
        ckpt.curve.push_back({rec.at("epoch").get<int>(), rec.at("train_loss").get<double>(),
                              rec.at("val_loss").get<double>(), rec.at("lr").get<double>()});
    }
    return ckpt;
}

void write_metrics_csv(const std::string& path, const std::vector<EpochRecord>& curve) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "epoch,train_loss,val_loss,lr\n";
    for (const auto& rec : curve) {
        out << rec.epoch << ',' << format_double(rec.train_loss) << ','
            << format_double(rec.val_loss) << ',' << format_double(rec.lr) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace netgrow
