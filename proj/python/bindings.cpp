// Python bindings for the netgrow core: simulation, oracles, and amortized
// posterior inference from trained checkpoints.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "netgrow/evaluation.hpp"
#include "netgrow/nde.hpp"
#include "netgrow/oracles.hpp"
#include "netgrow/serialize.hpp"
#include "netgrow/training.hpp"

namespace py = pybind11;
using namespace netgrow;

namespace {

Graph graph_from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    GraphBuilder b(n);
    for (const auto& [u, v] : edges) b.add_edge(u, v);
    return std::move(b).build();
}

py::dict posterior_to_dict(const BetaPosterior& post) {
    std::vector<double> alpha, beta;
    for (const auto& c : post.components) {
        alpha.push_back(c.alpha);
        beta.push_back(c.beta);
    }
    py::dict d;
    d["alpha"] = alpha;
    d["beta"] = beta;
    return d;
}

// Checkpoint handle exposing one-forward-pass posterior inference.
class Estimator {
  public:
    explicit Estimator(const std::string& path) : ckpt_(load_checkpoint(path)) {}

    std::string model() const { return ckpt_.model; }
    int gin_layers() const { return ckpt_.config.gin_layers; }
    double best_val() const { return ckpt_.best_val; }

    py::dict posterior(const Graph& g) {
        return posterior_to_dict(nde_posterior(ckpt_.params, ckpt_.config, g));
    }

    double log_prob(const std::vector<double>& theta, const Graph& g) {
        return netgrow::log_prob(theta, nde_posterior(ckpt_.params, ckpt_.config, g));
    }

  private:
    Checkpoint ckpt_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "growing-network simulators and neural posterior estimation";

    py::class_<Graph>(m, "Graph")
        .def(py::init(&graph_from_edges), py::arg("n"), py::arg("edges"))
        .def_property_readonly("n", &Graph::num_nodes)
        .def_property_readonly("num_edges", &Graph::num_edges)
        .def("degrees", &Graph::degrees)
        .def("edges", &Graph::edges)
        .def("neighbors", [](const Graph& g, int v) { return g.neighbors(v); })
        .def("serialize", [](const Graph& g) { return serialize_graph(g); })
        .def("__repr__", [](const Graph& g) {
            return "Graph(n=" + std::to_string(g.num_nodes()) +
                   ", edges=" + std::to_string(g.num_edges()) + ")";
        });

    m.def("model_names", [] { return model_names(); });
    m.def("model_info", [](const std::string& name) {
        const ModelSpec& spec = registry(name);
        py::dict d;
        d["name"] = spec.name;
        d["param_count"] = spec.param_count;
        if (spec.localization) {
            d["localization"] = *spec.localization;
        } else {
            d["localization"] = py::none();
        }
        std::vector<std::pair<double, double>> prior;
        for (const auto& c : spec.prior.components) prior.emplace_back(c.alpha, c.beta);
        d["prior"] = prior;
        return d;
    });
    m.def("prior_entropy", [](const std::string& name) { return prior_entropy(registry(name)); });

    m.def(
        "sample_prior",
        [](const std::string& name, std::uint64_t seed) {
            RngStream rng(seed);
            return sample_prior(registry(name), rng).theta;
        },
        py::arg("model"), py::arg("seed"));

    m.def(
        "simulate",
        [](const std::string& name, const std::vector<double>& theta, int n, std::uint64_t seed) {
            RngStream rng(seed);
            return simulate(registry(name), theta, n, rng, false).graph;
        },
        py::arg("model"), py::arg("theta"), py::arg("n"), py::arg("seed"));

    m.def("parse_graph", [](const std::string& line) {
        GraphRecord rec = parse_graph_record(line, 1);
        return py::make_tuple(rec.graph, rec.theta);
    });
    m.def("serialize_graph", [](const Graph& g, const std::vector<double>& theta) {
        return serialize_graph(g, theta);
    }, py::arg("graph"), py::arg("theta") = std::vector<double>{});

    m.def("k_hop_nodes", [](const Graph& g, const std::vector<int>& seeds, int k) {
        return k_hop_nodes(g, NodeSet::from_unsorted({seeds.begin(), seeds.end()}), k).values();
    });
    m.def("receptive_field", [](const Graph& g, int v, int k) {
        return receptive_field(g, v, k).values();
    });

    m.def("posterior_random_connection",
          [](const Graph& g) { return posterior_to_dict(posterior_random_connection(g)); });
    m.def(
        "posterior_connected_small_world",
        [](const Graph& g, int z) { return posterior_to_dict(posterior_connected_small_world(g, z)); },
        py::arg("graph"), py::arg("z") = 4);
    m.def("bruteforce_posterior", [](const Graph& g) {
        GridPosterior post = bruteforce_posterior_redirection(g, registry("redirection").prior);
        py::dict d;
        d["grid"] = post.grid;
        d["mass"] = post.mass;
        d["mean"] = post.mean();
        return d;
    });

    m.def(
        "generate_dataset",
        [](const std::string& model, int count, int n, std::uint64_t seed, const std::string& path) {
            generate_dataset(registry(model), count, n, seed, path);
        },
        py::arg("model"), py::arg("count"), py::arg("n"), py::arg("seed"), py::arg("path"));

    m.def(
        "train",
        [](const py::kwargs& kwargs) {
            TrainConfig cfg;
            std::string out_path, metrics_path;
            for (auto item : kwargs) {
                std::string key = py::cast<std::string>(item.first);
                if (key == "model") cfg.model = py::cast<std::string>(item.second);
                else if (key == "nodes") cfg.nodes = py::cast<int>(item.second);
                else if (key == "train_count") cfg.train_count = py::cast<int>(item.second);
                else if (key == "val_count") cfg.val_count = py::cast<int>(item.second);
                else if (key == "test_count") cfg.test_count = py::cast<int>(item.second);
                else if (key == "batch_size") cfg.batch_size = py::cast<int>(item.second);
                else if (key == "lr0") cfg.lr0 = py::cast<double>(item.second);
                else if (key == "lr_patience") cfg.lr_patience = py::cast<int>(item.second);
                else if (key == "stop_patience") cfg.stop_patience = py::cast<int>(item.second);
                else if (key == "restarts") cfg.restarts = py::cast<int>(item.second);
                else if (key == "max_epochs") cfg.max_epochs = py::cast<int>(item.second);
                else if (key == "gin_layers") cfg.gin_layers = py::cast<int>(item.second);
                else if (key == "total_layers") cfg.total_layers = py::cast<int>(item.second);
                else if (key == "width") cfg.width = py::cast<int>(item.second);
                else if (key == "hidden") cfg.hidden = py::cast<int>(item.second);
                else if (key == "seed") cfg.seed = py::cast<std::uint64_t>(item.second);
                else if (key == "out") out_path = py::cast<std::string>(item.second);
                else if (key == "metrics") metrics_path = py::cast<std::string>(item.second);
                else throw std::invalid_argument("train: unknown keyword " + key);
            }
            cfg.validate();
            const ModelSpec& spec = registry(cfg.model);
            Dataset train_set = sample_dataset(spec, cfg.train_count, cfg.nodes,
                                               derive_seed(cfg.seed, 1));
            Dataset val_set = sample_dataset(spec, cfg.val_count, cfg.nodes,
                                             derive_seed(cfg.seed, 2));
            Checkpoint ckpt = train(cfg, train_set, val_set);
            if (!out_path.empty()) save_checkpoint(ckpt, out_path);
            if (!metrics_path.empty()) write_metrics_csv(metrics_path, ckpt.curve);
            py::dict d;
            d["best_val"] = ckpt.best_val;
            d["best_epoch"] = ckpt.best_epoch;
            d["restart"] = ckpt.restart;
            d["epochs"] = ckpt.curve.size();
            return d;
        });

    m.def(
        "mutual_information",
        [](const std::string& ckpt_path, const std::string& test_path, int bootstrap,
           std::uint64_t seed) {
            Checkpoint ckpt = load_checkpoint(ckpt_path);
            Dataset test_set = load_dataset(test_path);
            EvalReport report = mutual_information(ckpt, test_set);
            py::dict d;
            d["model"] = report.model;
            d["gin_layers"] = report.gin_layers;
            d["mi"] = report.mi;
            d["test_nll"] = report.test_nll;
            d["prior_entropy"] = report.prior_entropy;
            d["eval_seconds"] = report.eval_seconds;
            if (bootstrap > 0) {
                BootstrapCI ci =
                    bootstrap_ci(report.per_graph_logp, report.prior_entropy, bootstrap, seed);
                d["ci"] = py::make_tuple(ci.lo, ci.hi);
            } else {
                d["ci"] = py::none();
            }
            if (report.baseline) {
                d["baseline"] = *report.baseline;
            } else {
                d["baseline"] = py::none();
            }
            return d;
        },
        py::arg("checkpoint"), py::arg("test"), py::arg("bootstrap") = 1000, py::arg("seed") = 0);

    py::class_<Estimator>(m, "Estimator")
        .def(py::init<const std::string&>(), py::arg("checkpoint"))
        .def_property_readonly("model", &Estimator::model)
        .def_property_readonly("gin_layers", &Estimator::gin_layers)
        .def_property_readonly("best_val", &Estimator::best_val)
        .def("posterior", &Estimator::posterior, py::arg("graph"))
        .def("log_prob", &Estimator::log_prob, py::arg("theta"), py::arg("graph"));
}
