// training.hpp — prior-predictive dataset generation, minibatch training
// with validation-stall learning-rate halving and early stopping, restarts,
// and checkpoint serialization.
#ifndef NETGROW_TRAINING_HPP_
#define NETGROW_TRAINING_HPP_

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "netgrow/models.hpp"
#include "netgrow/nde.hpp"

namespace netgrow {

struct TrainConfig {
    std::string model;
    int nodes = 200;
    int train_count = 2000;
    int val_count = 200;
    int test_count = 500;
    int batch_size = 32;
    double lr0 = 1e-2;
    int lr_patience = 10;
    int stop_patience = 25;
    int restarts = 5;
    int max_epochs = 1000;
    double improve_tol = 1e-6;
    int gin_layers = 1;
    int total_layers = 5;
    int width = 8;
    int hidden = 8;
    std::uint64_t seed = 0;

    NDEConfig nde_config() const;
    void validate() const;
};

struct Example {
    std::vector<double> theta;
    Graph graph;
};

using Dataset = std::vector<Example>;

struct EpochRecord {
    int epoch;
    double train_loss;
    double val_loss;
    double lr;
};

struct Checkpoint {
    int version = 1;
    std::string model;
    NDEConfig config;
    ParamStore params;
    std::vector<EpochRecord> curve;  // winning restart
    std::uint64_t seed = 0;          // training master seed
    int restart = -1;                // winning restart index
    double best_val = 0.0;
    int best_epoch = -1;
};

// Writes count prior-predictive records to path. Record i is generated from
// stream split(seed, i), so regeneration is independent of order.
void generate_dataset(const ModelSpec& spec, int count, int nodes, std::uint64_t seed,
                      const std::string& path);

// In-memory variant used by the training drivers.
Dataset sample_dataset(const ModelSpec& spec, int count, int nodes, std::uint64_t seed);

Dataset load_dataset(const std::string& path);

// Decides when to halve the learning rate and when to stop, given the
// validation loss after each epoch. The halving counter resets on halving.
class EarlyStopper {
  public:
    EarlyStopper(int lr_patience, int stop_patience, double tol)
        : lr_patience_(lr_patience), stop_patience_(stop_patience), tol_(tol) {}

    struct Decision {
        bool improved = false;
        bool halve = false;
        bool stop = false;
    };

    Decision observe(double val_loss);
    double best() const { return best_; }
    int best_epoch() const { return best_epoch_; }

  private:
    int lr_patience_;
    int stop_patience_;
    double tol_;
    double best_ = std::numeric_limits<double>::infinity();
    int best_epoch_ = -1;
    int epoch_ = -1;
    int since_improve_lr_ = 0;
    int since_improve_stop_ = 0;
};

// Trains restarts independent runs and returns the one with the lowest
// validation loss, with parameters restored to its best epoch.
Checkpoint train(const TrainConfig& config, const Dataset& train_set, const Dataset& val_set);

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

void write_metrics_csv(const std::string& path, const std::vector<EpochRecord>& curve);

// Mean NLL of a dataset under the current parameters, evaluated in chunks.
double dataset_nll(ParamStore& params, const NDEConfig& config, const Dataset& data);

}  // namespace netgrow

#endif  // NETGROW_TRAINING_HPP_
