// autodiff.hpp — dense reverse-mode differentiation on a dynamic tape.
//
// The op vocabulary is exactly what the density estimator needs: dense
// matrix algebra, neighborhood aggregation over an explicit edge structure,
// segment means for pooled graph features, and the gamma-family special
// functions whose derivatives (digamma, trigamma) close the loss gradient.
#ifndef NETGROW_AUTODIFF_HPP_
#define NETGROW_AUTODIFF_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace netgrow {

struct Tensor {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Tensor() = default;
    Tensor(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0) {}
    static Tensor filled(int r, int c, double value);
    static Tensor row(std::vector<double> values);
    static Tensor scalar(double value);

    double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
    std::size_t size() const { return v.size(); }
    bool same_shape(const Tensor& other) const { return rows == other.rows && cols == other.cols; }
};

// Disjoint-union batch of graphs: per-node membership plus a flat, sorted
// neighbor structure for aggregation.
struct BatchedGraph {
    int num_nodes = 0;
    int num_graphs = 0;
    std::vector<int> membership;     // node -> graph index
    std::vector<int> graph_sizes;    // graph index -> node count
    std::vector<int> offsets;        // CSR offsets into neighbors, size num_nodes + 1
    std::vector<int> neighbors;      // concatenated sorted neighbor lists
};

class Graph;
BatchedGraph make_batch(const std::vector<const Graph*>& graphs);

// Named parameters with gradient accumulators and Adam moments.
class ParamStore {
  public:
    int add(const std::string& name, Tensor init);
    int index_of(const std::string& name) const;
    bool contains(const std::string& name) const;
    std::size_t count() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }

    Tensor& value(int i) { return values_[i]; }
    const Tensor& value(int i) const { return values_[i]; }
    Tensor& value(const std::string& name) { return values_[index_of(name)]; }
    const Tensor& value(const std::string& name) const { return values_[index_of(name)]; }
    Tensor& grad(int i) { return grads_[i]; }
    const Tensor& grad(int i) const { return grads_[i]; }
    const Tensor& grad(const std::string& name) const { return grads_[index_of(name)]; }
    Tensor& adam_m(int i) { return adam_m_[i]; }
    Tensor& adam_v(int i) { return adam_v_[i]; }
    long step_count() const { return step_; }
    void set_step_count(long s) { step_ = s; }

    void zero_grads();
    std::size_t total_parameters() const;

  private:
    friend void adam_step(ParamStore&, double, double, double, double);
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> index_;
    std::vector<Tensor> values_;
    std::vector<Tensor> grads_;
    std::vector<Tensor> adam_m_;
    std::vector<Tensor> adam_v_;
    long step_ = 0;
};

// Bias-corrected Adam update applied in place; increments the step counter.
void adam_step(ParamStore& store, double lr, double beta1 = 0.9, double beta2 = 0.999,
               double eps = 1e-8);

struct TapeRef {
    int index = -1;
};

class Tape {
  public:
    explicit Tape(ParamStore* store = nullptr);
    ~Tape();
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    TapeRef param(const std::string& name);
    TapeRef constant(Tensor t);

    TapeRef matmul(TapeRef a, TapeRef b);
    TapeRef add(TapeRef a, TapeRef b);
    TapeRef sub(TapeRef a, TapeRef b);
    TapeRef add_bias_row(TapeRef x, TapeRef bias);
    // gamma is a 1x1 parameter scaling every entry of x.
    TapeRef scale(TapeRef gamma, TapeRef x);
    TapeRef scale_const(TapeRef x, double c);
    TapeRef shift_const(TapeRef x, double c);
    TapeRef mul_const(TapeRef x, Tensor weights);  // elementwise, constant weights
    TapeRef tanh(TapeRef x);
    TapeRef softplus(TapeRef x);
    TapeRef log(TapeRef x);
    TapeRef lgamma(TapeRef x);
    TapeRef digamma(TapeRef x);
    TapeRef broadcast_cols(TapeRef x, int cols);  // N x 1 -> N x cols
    TapeRef sparse_aggregate(const BatchedGraph& batch, TapeRef h);  // (A + I) H
    TapeRef segment_mean(const BatchedGraph& batch, TapeRef h);      // per-graph column means
    TapeRef slice_cols_stride(TapeRef x, int offset, int stride);
    TapeRef concat_rows(TapeRef a, TapeRef b);
    TapeRef row_sum(TapeRef x);   // N x C -> N x 1
    TapeRef mean_all(TapeRef x);  // mean of all entries -> 1 x 1

    const Tensor& value(TapeRef r) const;
    double scalar(TapeRef r) const;

    // Reverse pass from a 1x1 loss; parameter gradients land in the store
    // (accumulators are zeroed first).
    void backward(TapeRef loss);

    // Recomputes every forward value from its inputs and checks bit-exact
    // agreement with the recorded values.
    bool replay_matches() const;

    std::size_t node_count() const;

  private:
    enum class Op;
    struct Node;
    TapeRef push(Node node);
    Tensor eval(const Node& node) const;
    void check_finite(const Tensor& t, const char* op_name) const;

    ParamStore* store_;
    std::vector<Node> nodes_;
};

}  // namespace netgrow

#endif  // NETGROW_AUTODIFF_HPP_
