#include "netgrow/autodiff.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "netgrow/graph.hpp"
#include "netgrow/special.hpp"

namespace netgrow {

namespace {

// Training allocates and frees a few hundred-KB tensors per minibatch; with
// glibc defaults those land on mmap and the pages bounce through the kernel.
// Raising the thresholds keeps the churn inside the arena.
struct AllocatorTuning {
    AllocatorTuning() {
#if defined(__GLIBC__)
        mallopt(M_MMAP_THRESHOLD, 256 << 20);
        mallopt(M_TRIM_THRESHOLD, 256 << 20);
#endif
    }
};
const AllocatorTuning allocator_tuning;

}  // namespace

Tensor Tensor::filled(int r, int c, double value) {
    Tensor t(r, c);
    std::fill(t.v.begin(), t.v.end(), value);
    return t;
}

Tensor Tensor::row(std::vector<double> values) {
    Tensor t;
    t.rows = 1;
    t.cols = static_cast<int>(values.size());
    t.v = std::move(values);
    return t;
}

Tensor Tensor::scalar(double value) {
    Tensor t(1, 1);
    t.v[0] = value;
    return t;
}

BatchedGraph make_batch(const std::vector<const Graph*>& graphs) {
    if (graphs.empty()) throw std::invalid_argument("make_batch: empty batch");
    BatchedGraph batch;
    batch.num_graphs = static_cast<int>(graphs.size());
    int total = 0;
    for (const Graph* g : graphs) {
        if (g->num_nodes() == 0) throw std::invalid_argument("make_batch: empty graph");
        batch.graph_sizes.push_back(g->num_nodes());
        total += g->num_nodes();
    }
    batch.num_nodes = total;
    batch.membership.reserve(total);
    batch.offsets.reserve(total + 1);
    batch.offsets.push_back(0);
    int base = 0;
    for (int gi = 0; gi < batch.num_graphs; ++gi) {
        const Graph& g = *graphs[gi];
        for (node_t v = 0; v < g.num_nodes(); ++v) {
            batch.membership.push_back(gi);
            for (node_t w : g.neighbors(v)) batch.neighbors.push_back(base + w);
            batch.offsets.push_back(static_cast<int>(batch.neighbors.size()));
        }
        base += g.num_nodes();
    }
    return batch;
}

int ParamStore::add(const std::string& name, Tensor init) {
    if (index_.count(name)) throw std::invalid_argument("ParamStore: duplicate parameter " + name);
    int i = static_cast<int>(names_.size());
    names_.push_back(name);
    index_[name] = i;
    grads_.emplace_back(init.rows, init.cols);
    adam_m_.emplace_back(init.rows, init.cols);
    adam_v_.emplace_back(init.rows, init.cols);
    values_.push_back(std::move(init));
    return i;
}

int ParamStore::index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::out_of_range("ParamStore: unknown parameter " + name);
    return it->second;
}

bool ParamStore::contains(const std::string& name) const { return index_.count(name) > 0; }

void ParamStore::zero_grads() {
    for (auto& g : grads_) std::fill(g.v.begin(), g.v.end(), 0.0);
}

std::size_t ParamStore::total_parameters() const {
    std::size_t total = 0;
    for (const auto& t : values_) total += t.size();
    return total;
}

void adam_step(ParamStore& store, double lr, double beta1, double beta2, double eps) {
    long t = ++store.step_;
    double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < store.values_.size(); ++i) {
        auto& p = store.values_[i].v;
        auto& g = store.grads_[i].v;
        auto& m = store.adam_m_[i].v;
        auto& v = store.adam_v_[i].v;
        for (std::size_t j = 0; j < p.size(); ++j) {
            m[j] = beta1 * m[j] + (1.0 - beta1) * g[j];
            v[j] = beta2 * v[j] + (1.0 - beta2) * g[j] * g[j];
            p[j] -= lr * (m[j] / bc1) / (std::sqrt(v[j] / bc2) + eps);
        }
    }
}

enum class Tape::Op {
    kParam,
    kConstant,
    kMatmul,
    kAdd,
    kSub,
    kAddBiasRow,
    kScale,
    kScaleConst,
    kShiftConst,
    kMulConst,
    kTanh,
    kSoftplus,
    kLog,
    kLgamma,
    kDigamma,
    kBroadcastCols,
    kSparseAggregate,
    kSegmentMean,
    kSliceColsStride,
    kConcatRows,
    kRowSum,
    kMeanAll,
};

namespace {

const char* op_name(int op) {
    static const char* names[] = {
        "param", "constant", "matmul", "add", "sub", "add_bias_row", "scale", "scale_const",
        "shift_const", "mul_const", "tanh", "softplus", "log", "lgamma", "digamma",
        "broadcast_cols", "sparse_aggregate", "segment_mean", "slice_cols_stride", "concat_rows",
        "row_sum", "mean_all"};
    return names[op];
}

}  // namespace

struct Tape::Node {
    Op op;
    int a = -1;
    int b = -1;
    Tensor val;
    double c0 = 0.0;
    int i0 = 0;
    int i1 = 0;
    Tensor weights;
    const BatchedGraph* batch = nullptr;
    int param_index = -1;
};

Tape::Tape(ParamStore* store) : store_(store) {}
Tape::~Tape() = default;

std::size_t Tape::node_count() const { return nodes_.size(); }

void Tape::check_finite(const Tensor& t, const char* name) const {
    for (double x : t.v) {
        if (!std::isfinite(x)) {
            throw std::runtime_error(std::string("autodiff: non-finite output in op ") + name);
        }
    }
}

TapeRef Tape::push(Node node) {
    if (node.op != Op::kParam && node.op != Op::kConstant) {
        node.val = eval(node);
    }
    check_finite(node.val, op_name(static_cast<int>(node.op)));
    nodes_.push_back(std::move(node));
    return TapeRef{static_cast<int>(nodes_.size()) - 1};
}

const Tensor& Tape::value(TapeRef r) const { return nodes_.at(r.index).val; }

double Tape::scalar(TapeRef r) const {
    const Tensor& t = value(r);
    if (t.size() != 1) throw std::invalid_argument("Tape::scalar: tensor is not 1x1");
    return t.v[0];
}

TapeRef Tape::param(const std::string& name) {
    if (!store_) throw std::logic_error("Tape::param: no parameter store bound");
    Node n;
    n.op = Op::kParam;
    n.param_index = store_->index_of(name);
    n.val = store_->value(n.param_index);
    return push(std::move(n));
}

TapeRef Tape::constant(Tensor t) {
    Node n;
    n.op = Op::kConstant;
    n.val = std::move(t);
    return push(std::move(n));
}

Tensor Tape::eval(const Node& node) const {
    auto in = [&](int i) -> const Tensor& { return nodes_[i].val; };
    switch (node.op) {
        case Op::kParam:
        case Op::kConstant:
            return node.val;
        case Op::kMatmul: {
            const Tensor& A = in(node.a);
            const Tensor& B = in(node.b);
            Tensor out(A.rows, B.cols);
            for (int i = 0; i < A.rows; ++i) {
                const double* arow = &A.v[static_cast<std::size_t>(i) * A.cols];
                double* orow = &out.v[static_cast<std::size_t>(i) * B.cols];
                for (int k = 0; k < A.cols; ++k) {
                    double a = arow[k];
                    if (a == 0.0) continue;
                    const double* brow = &B.v[static_cast<std::size_t>(k) * B.cols];
                    for (int j = 0; j < B.cols; ++j) orow[j] += a * brow[j];
                }
            }
            return out;
        }
        case Op::kAdd: {
            Tensor out = in(node.a);
            const Tensor& B = in(node.b);
            for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += B.v[i];
            return out;
        }
        case Op::kSub: {
            Tensor out = in(node.a);
            const Tensor& B = in(node.b);
            for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] -= B.v[i];
            return out;
        }
        case Op::kAddBiasRow: {
            Tensor out = in(node.a);
            const Tensor& bias = in(node.b);
            for (int i = 0; i < out.rows; ++i) {
                for (int j = 0; j < out.cols; ++j) out.at(i, j) += bias.v[j];
            }
            return out;
        }
        case Op::kScale: {
            double g = in(node.a).v[0];
            Tensor out = in(node.b);
            for (double& x : out.v) x *= g;
            return out;
        }
        case Op::kScaleConst: {
            Tensor out = in(node.a);
            for (double& x : out.v) x *= node.c0;
            return out;
        }
        case Op::kShiftConst: {
            Tensor out = in(node.a);
            for (double& x : out.v) x += node.c0;
            return out;
        }
        case Op::kMulConst: {
            Tensor out = in(node.a);
            for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] *= node.weights.v[i];
            return out;
        }
        case Op::kTanh: {
            Tensor out = in(node.a);
            for (double& x : out.v) x = std::tanh(x);
            return out;
        }
        case Op::kSoftplus: {
            Tensor out = in(node.a);
            for (double& x : out.v) x = netgrow::softplus(x);
            return out;
        }
        case Op::kLog: {
            Tensor out = in(node.a);
            for (double& x : out.v) x = std::log(x);
            return out;
        }
        case Op::kLgamma: {
            Tensor out = in(node.a);
            for (double& x : out.v) x = log_gamma(x);
            return out;
        }
        case Op::kDigamma: {
            Tensor out = in(node.a);
            for (double& x : out.v) x = netgrow::digamma(x);
            return out;
        }
        case Op::kBroadcastCols: {
            const Tensor& A = in(node.a);
            Tensor out(A.rows, node.i0);
            for (int i = 0; i < A.rows; ++i) {
                for (int j = 0; j < node.i0; ++j) out.at(i, j) = A.v[i];
            }
            return out;
        }
        case Op::kSparseAggregate: {
            const Tensor& H = in(node.a);
            const BatchedGraph& batch = *node.batch;
            Tensor out(H.rows, H.cols);
            for (int v = 0; v < batch.num_nodes; ++v) {
                double* orow = &out.v[static_cast<std::size_t>(v) * H.cols];
                const double* self = &H.v[static_cast<std::size_t>(v) * H.cols];
                for (int j = 0; j < H.cols; ++j) orow[j] = self[j];
                for (int e = batch.offsets[v]; e < batch.offsets[v + 1]; ++e) {
                    const double* nrow = &H.v[static_cast<std::size_t>(batch.neighbors[e]) * H.cols];
                    for (int j = 0; j < H.cols; ++j) orow[j] += nrow[j];
                }
            }
            return out;
        }
        case Op::kSegmentMean: {
            const Tensor& H = in(node.a);
            const BatchedGraph& batch = *node.batch;
            Tensor out(batch.num_graphs, H.cols);
            // Kahan accumulation keeps pooled features permutation-stable.
            Tensor comp(batch.num_graphs, H.cols);
            for (int v = 0; v < batch.num_nodes; ++v) {
                int g = batch.membership[v];
                for (int j = 0; j < H.cols; ++j) {
                    double y = H.at(v, j) - comp.at(g, j);
                    double t = out.at(g, j) + y;
                    comp.at(g, j) = (t - out.at(g, j)) - y;
                    out.at(g, j) = t;
                }
            }
            for (int g = 0; g < batch.num_graphs; ++g) {
                for (int j = 0; j < H.cols; ++j) out.at(g, j) /= batch.graph_sizes[g];
            }
            return out;
        }
        case Op::kSliceColsStride: {
            const Tensor& A = in(node.a);
            int count = (A.cols - node.i0 + node.i1 - 1) / node.i1;
            Tensor out(A.rows, count);
            for (int i = 0; i < A.rows; ++i) {
                for (int k = 0; k < count; ++k) out.at(i, k) = A.at(i, node.i0 + k * node.i1);
            }
            return out;
        }
        case Op::kConcatRows: {
            const Tensor& A = in(node.a);
            const Tensor& B = in(node.b);
            Tensor out(A.rows + B.rows, A.cols);
            std::memcpy(out.v.data(), A.v.data(), A.v.size() * sizeof(double));
            std::memcpy(out.v.data() + A.v.size(), B.v.data(), B.v.size() * sizeof(double));
            return out;
        }
        case Op::kRowSum: {
            const Tensor& A = in(node.a);
            Tensor out(A.rows, 1);
            for (int i = 0; i < A.rows; ++i) {
                double s = 0.0;
                for (int j = 0; j < A.cols; ++j) s += A.at(i, j);
                out.v[i] = s;
            }
            return out;
        }
        case Op::kMeanAll: {
            const Tensor& A = in(node.a);
            double s = 0.0;
            double comp = 0.0;
            for (double x : A.v) {
                double y = x - comp;
                double t = s + y;
                comp = (t - s) - y;
                s = t;
            }
            return Tensor::scalar(s / static_cast<double>(A.size()));
        }
    }
    throw std::logic_error("autodiff: unreachable op");
}

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(std::string("autodiff: ") + msg);
}

}  // namespace

TapeRef Tape::matmul(TapeRef a, TapeRef b) {
    require(value(a).cols == value(b).rows, "matmul shape mismatch");
    Node n;
    n.op = Op::kMatmul;
    n.a = a.index;
    n.b = b.index;
    return push(std::move(n));
}

TapeRef Tape::add(TapeRef a, TapeRef b) {
    require(value(a).same_shape(value(b)), "add shape mismatch");
    Node n;
    n.op = Op::kAdd;
    n.a = a.index;
    n.b = b.index;
    return push(std::move(n));
}

TapeRef Tape::sub(TapeRef a, TapeRef b) {
    require(value(a).same_shape(value(b)), "sub shape mismatch");
    Node n;
    n.op = Op::kSub;
    n.a = a.index;
    n.b = b.index;
    return push(std::move(n));
}

TapeRef Tape::add_bias_row(TapeRef x, TapeRef bias) {
    require(value(bias).rows == 1 && value(bias).cols == value(x).cols,
            "add_bias_row shape mismatch");
    Node n;
    n.op = Op::kAddBiasRow;
    n.a = x.index;
    n.b = bias.index;
    return push(std::move(n));
}

TapeRef Tape::scale(TapeRef gamma, TapeRef x) {
    require(value(gamma).size() == 1, "scale expects a 1x1 factor");
    Node n;
    n.op = Op::kScale;
    n.a = gamma.index;
    n.b = x.index;
    return push(std::move(n));
}

TapeRef Tape::scale_const(TapeRef x, double c) {
    Node n;
    n.op = Op::kScaleConst;
    n.a = x.index;
    n.c0 = c;
    return push(std::move(n));
}

TapeRef Tape::shift_const(TapeRef x, double c) {
    Node n;
    n.op = Op::kShiftConst;
    n.a = x.index;
    n.c0 = c;
    return push(std::move(n));
}

TapeRef Tape::mul_const(TapeRef x, Tensor weights) {
    require(value(x).same_shape(weights), "mul_const shape mismatch");
    Node n;
    n.op = Op::kMulConst;
    n.a = x.index;
    n.weights = std::move(weights);
    return push(std::move(n));
}

TapeRef Tape::tanh(TapeRef x) {
    Node n;
    n.op = Op::kTanh;
    n.a = x.index;
    return push(std::move(n));
}

TapeRef Tape::softplus(TapeRef x) {
    Node n;
    n.op = Op::kSoftplus;
    n.a = x.index;
    return push(std::move(n));
}

TapeRef Tape::log(TapeRef x) {
    Node n;
    n.op = Op::kLog;
    n.a = x.index;
    return push(std::move(n));
}

TapeRef Tape::lgamma(TapeRef x) {
    Node n;
    n.op = Op::kLgamma;
    n.a = x.index;
    return push(std::move(n));
}

TapeRef Tape::digamma(TapeRef x) {
    Node n;
    n.op = Op::kDigamma;
    n.a = x.index;
    return push(std::move(n));
}

TapeRef Tape::broadcast_cols(TapeRef x, int cols) {
    require(value(x).cols == 1, "broadcast_cols expects a column vector");
    require(cols >= 1, "broadcast_cols: bad width");
    Node n;
    n.op = Op::kBroadcastCols;
    n.a = x.index;
    n.i0 = cols;
    return push(std::move(n));
}

TapeRef Tape::sparse_aggregate(const BatchedGraph& batch, TapeRef h) {
    require(value(h).rows == batch.num_nodes, "sparse_aggregate row mismatch");
    Node n;
    n.op = Op::kSparseAggregate;
    n.a = h.index;
    n.batch = &batch;
    return push(std::move(n));
}

TapeRef Tape::segment_mean(const BatchedGraph& batch, TapeRef h) {
    require(value(h).rows == batch.num_nodes, "segment_mean row mismatch");
    Node n;
    n.op = Op::kSegmentMean;
    n.a = h.index;
    n.batch = &batch;
    return push(std::move(n));
}

TapeRef Tape::slice_cols_stride(TapeRef x, int offset, int stride) {
    require(offset >= 0 && offset < value(x).cols && stride >= 1, "slice_cols_stride: bad range");
    Node n;
    n.op = Op::kSliceColsStride;
    n.a = x.index;
    n.i0 = offset;
    n.i1 = stride;
    return push(std::move(n));
}

TapeRef Tape::concat_rows(TapeRef a, TapeRef b) {
    require(value(a).cols == value(b).cols, "concat_rows column mismatch");
    Node n;
    n.op = Op::kConcatRows;
    n.a = a.index;
    n.b = b.index;
    return push(std::move(n));
}

TapeRef Tape::row_sum(TapeRef x) {
    Node n;
    n.op = Op::kRowSum;
    n.a = x.index;
    return push(std::move(n));
}

TapeRef Tape::mean_all(TapeRef x) {
    Node n;
    n.op = Op::kMeanAll;
    n.a = x.index;
    return push(std::move(n));
}

void Tape::backward(TapeRef loss) {
    if (loss.index < 0 || loss.index >= static_cast<int>(nodes_.size())) {
        throw std::invalid_argument("backward: loss is not on this tape");
    }
    if (nodes_[loss.index].val.size() != 1) {
        throw std::invalid_argument("backward: loss must be a scalar");
    }
    if (store_) store_->zero_grads();

    std::vector<Tensor> grads(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        grads[i] = Tensor(nodes_[i].val.rows, nodes_[i].val.cols);
    }
    grads[loss.index].v[0] = 1.0;

    for (int i = loss.index; i >= 0; --i) {
        const Node& node = nodes_[i];
        const Tensor& g = grads[i];
        switch (node.op) {
            case Op::kParam:
                if (store_) {
                    Tensor& pg = store_->grad(node.param_index);
                    for (std::size_t j = 0; j < g.v.size(); ++j) pg.v[j] += g.v[j];
                }
                break;
            case Op::kConstant:
                break;
            case Op::kMatmul: {
                const Tensor& A = nodes_[node.a].val;
                const Tensor& B = nodes_[node.b].val;
                Tensor& da = grads[node.a];
                Tensor& db = grads[node.b];
                // dA = G B^T
                for (int r = 0; r < A.rows; ++r) {
                    for (int k = 0; k < A.cols; ++k) {
                        double s = 0.0;
                        for (int j = 0; j < B.cols; ++j) s += g.at(r, j) * B.at(k, j);
                        da.at(r, k) += s;
                    }
                }
                // dB = A^T G
                for (int r = 0; r < A.rows; ++r) {
                    for (int k = 0; k < A.cols; ++k) {
                        double a = A.at(r, k);
                        if (a == 0.0) continue;
                        for (int j = 0; j < B.cols; ++j) db.at(k, j) += a * g.at(r, j);
                    }
                }
                break;
            }
            case Op::kAdd: {
                Tensor& da = grads[node.a];
                Tensor& db = grads[node.b];
                for (std::size_t j = 0; j < g.v.size(); ++j) {
                    da.v[j] += g.v[j];
                    db.v[j] += g.v[j];
                }
                break;
            }
            case Op::kSub: {
                Tensor& da = grads[node.a];
                Tensor& db = grads[node.b];
                for (std::size_t j = 0; j < g.v.size(); ++j) {
                    da.v[j] += g.v[j];
                    db.v[j] -= g.v[j];
                }
                break;
            }
            case Op::kAddBiasRow: {
                Tensor& da = grads[node.a];
                Tensor& db = grads[node.b];
                for (std::size_t j = 0; j < g.v.size(); ++j) da.v[j] += g.v[j];
                for (int r = 0; r < g.rows; ++r) {
                    for (int j = 0; j < g.cols; ++j) db.v[j] += g.at(r, j);
                }
                break;
            }
            case Op::kScale: {
                double gamma = nodes_[node.a].val.v[0];
                const Tensor& X = nodes_[node.b].val;
                double dg = 0.0;
                Tensor& db = grads[node.b];
                for (std::size_t j = 0; j < g.v.size(); ++j) {
                    dg += g.v[j] * X.v[j];
                    db.v[j] += gamma * g.v[j];
                }
                grads[node.a].v[0] += dg;
                break;
            }
            case Op::kScaleConst: {
                Tensor& da = grads[node.a];
                for (std::size_t j = 0; j < g.v.size(); ++j) da.v[j] += node.c0 * g.v[j];
                break;
            }
            case Op::kShiftConst: {
                Tensor& da = grads[node.a];
                for (std::size_t j = 0; j < g.v.size(); ++j) da.v[j] += g.v[j];
                break;
            }
            case Op::kMulConst: {
                Tensor& da = grads[node.a];
                for (std::size_t j = 0; j < g.v.size(); ++j) da.v[j] += g.v[j] * node.weights.v[j];
                break;
            }
            case Op::kTanh: {
                Tensor& da = grads[node.a];
                for (std::size_t j = 0; j < g.v.size(); ++j) {
                    double y = node.val.v[j];
                    da.v[j] += g.v[j] * (1.0 - y * y);
                }
                break;
            }
            case Op::kSoftplus: {
                const Tensor& X = nodes_[node.a].val;
                Tensor& da = grads[node.a];
                for (std::size_t j = 0; j < g.v.size(); ++j) {
                    da.v[j] += g.v[j] / (1.0 + std::exp(-X.v[j]));
                }
                break;
            }
            case Op::kLog: {
                const Tensor& X = nodes_[node.a].val;
                Tensor& da = grads[node.a];
                for (std::size_t j = 0; j < g.v.size(); ++j) da.v[j] += g.v[j] / X.v[j];
                break;
            }
            case Op::kLgamma: {
                const Tensor& X = nodes_[node.a].val;
                Tensor& da = grads[node.a];
                for (std::size_t j = 0; j < g.v.size(); ++j) {
                    da.v[j] += g.v[j] * netgrow::digamma(X.v[j]);
                }
                break;
            }
            case Op::kDigamma: {
                const Tensor& X = nodes_[node.a].val;
                Tensor& da = grads[node.a];
                for (std::size_t j = 0; j < g.v.size(); ++j) {
                    da.v[j] += g.v[j] * netgrow::trigamma(X.v[j]);
                }
                break;
            }
            case Op::kBroadcastCols: {
                Tensor& da = grads[node.a];
                for (int r = 0; r < g.rows; ++r) {
                    double s = 0.0;
                    for (int j = 0; j < g.cols; ++j) s += g.at(r, j);
                    da.v[r] += s;
                }
                break;
            }
            case Op::kSparseAggregate: {
                const BatchedGraph& batch = *node.batch;
                Tensor& da = grads[node.a];
                for (int v = 0; v < batch.num_nodes; ++v) {
                    const double* grow = &g.v[static_cast<std::size_t>(v) * g.cols];
                    double* self = &da.v[static_cast<std::size_t>(v) * g.cols];
                    for (int j = 0; j < g.cols; ++j) self[j] += grow[j];
                    for (int e = batch.offsets[v]; e < batch.offsets[v + 1]; ++e) {
                        double* nrow = &da.v[static_cast<std::size_t>(batch.neighbors[e]) * g.cols];
                        for (int j = 0; j < g.cols; ++j) nrow[j] += grow[j];
                    }
                }
                break;
            }
            case Op::kSegmentMean: {
                const BatchedGraph& batch = *node.batch;
                Tensor& da = grads[node.a];
                for (int v = 0; v < batch.num_nodes; ++v) {
                    int gi = batch.membership[v];
                    double inv = 1.0 / batch.graph_sizes[gi];
                    for (int j = 0; j < g.cols; ++j) da.at(v, j) += g.at(gi, j) * inv;
                }
                break;
            }
            case Op::kSliceColsStride: {
                Tensor& da = grads[node.a];
                for (int r = 0; r < g.rows; ++r) {
                    for (int k = 0; k < g.cols; ++k) {
                        da.at(r, node.i0 + k * node.i1) += g.at(r, k);
                    }
                }
                break;
            }
            case Op::kConcatRows: {
                Tensor& da = grads[node.a];
                Tensor& db = grads[node.b];
                std::size_t na = da.v.size();
                for (std::size_t j = 0; j < na; ++j) da.v[j] += g.v[j];
                for (std::size_t j = 0; j < db.v.size(); ++j) db.v[j] += g.v[na + j];
                break;
            }
            case Op::kRowSum: {
                Tensor& da = grads[node.a];
                for (int r = 0; r < da.rows; ++r) {
                    for (int j = 0; j < da.cols; ++j) da.at(r, j) += g.v[r];
                }
                break;
            }
            case Op::kMeanAll: {
                Tensor& da = grads[node.a];
                double w = g.v[0] / static_cast<double>(da.size());
                for (double& x : da.v) x += w;
                break;
            }
        }
    }
}

bool Tape::replay_matches() const {
    for (const Node& node : nodes_) {
        if (node.op == Op::kParam || node.op == Op::kConstant) continue;
        Tensor recomputed = eval(node);
        if (recomputed.v.size() != node.val.v.size()) return false;
        if (std::memcmp(recomputed.v.data(), node.val.v.data(),
                        recomputed.v.size() * sizeof(double)) != 0) {
            return false;
        }
    }
    return true;
}

}  // namespace netgrow
