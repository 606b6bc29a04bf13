#include "netgrow/graph.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace netgrow {

NodeSet::NodeSet(std::vector<node_t> sorted_unique) : nodes_(std::move(sorted_unique)) {
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        if (nodes_[i - 1] >= nodes_[i]) {
            throw std::invalid_argument("NodeSet: labels must be strictly increasing");
        }
    }
}

NodeSet NodeSet::from_unsorted(std::vector<node_t> nodes) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return NodeSet(std::move(nodes));
}

bool NodeSet::contains(node_t v) const {
    return std::binary_search(nodes_.begin(), nodes_.end(), v);
}

int Graph::degree(node_t v) const {
    if (v < 0 || v >= n_) throw std::out_of_range("Graph: node label out of range");
    return static_cast<int>(adj_[v].size());
}

const std::vector<node_t>& Graph::neighbors(node_t v) const {
    if (v < 0 || v >= n_) throw std::out_of_range("Graph: node label out of range");
    return adj_[v];
}

bool Graph::has_edge(node_t u, node_t v) const {
    if (u < 0 || u >= n_ || v < 0 || v >= n_) throw std::out_of_range("Graph: node label out of range");
    const auto& a = adj_[u].size() <= adj_[v].size() ? adj_[u] : adj_[v];
    node_t target = adj_[u].size() <= adj_[v].size() ? v : u;
    return std::binary_search(a.begin(), a.end(), target);
}

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    out.reserve(m_);
    for (node_t u = 0; u < n_; ++u) {
        for (node_t v : adj_[u]) {
            if (v > u) out.emplace_back(u, v);
        }
    }
    return out;
}

std::vector<int> Graph::degrees() const {
    std::vector<int> d(n_);
    for (node_t v = 0; v < n_; ++v) d[v] = static_cast<int>(adj_[v].size());
    return d;
}

GraphBuilder::GraphBuilder(node_t n) : n_(n), adj_(static_cast<std::size_t>(n)) {
    if (n < 0) throw std::invalid_argument("GraphBuilder: negative node count");
}

GraphBuilder::GraphBuilder(const Graph& g) : n_(g.num_nodes()), m_(g.num_edges()), adj_(g.adjacency()) {}

void GraphBuilder::check_node(node_t v) const {
    if (v < 0 || v >= n_) throw std::out_of_range("GraphBuilder: node label out of range");
}

int GraphBuilder::degree(node_t v) const {
    check_node(v);
    return static_cast<int>(adj_[v].size());
}

const std::vector<node_t>& GraphBuilder::neighbors(node_t v) const {
    check_node(v);
    return adj_[v];
}

bool GraphBuilder::has_edge(node_t u, node_t v) const {
    check_node(u);
    check_node(v);
    const auto& a = adj_[u].size() <= adj_[v].size() ? adj_[u] : adj_[v];
    node_t target = adj_[u].size() <= adj_[v].size() ? v : u;
    return std::binary_search(a.begin(), a.end(), target);
}

node_t GraphBuilder::add_node() {
    adj_.emplace_back();
    return n_++;
}

bool GraphBuilder::add_edge(node_t u, node_t v) {
    check_node(u);
    check_node(v);
    if (u == v) throw std::invalid_argument("GraphBuilder: self-loops are not allowed");
    auto& au = adj_[u];
    auto it = std::lower_bound(au.begin(), au.end(), v);
    if (it != au.end() && *it == v) return false;
    au.insert(it, v);
    auto& av = adj_[v];
    av.insert(std::lower_bound(av.begin(), av.end(), u), u);
    ++m_;
    return true;
}

bool GraphBuilder::remove_edge(node_t u, node_t v) {
    check_node(u);
    check_node(v);
    auto& au = adj_[u];
    auto it = std::lower_bound(au.begin(), au.end(), v);
    if (it == au.end() || *it != v) return false;
    au.erase(it);
    auto& av = adj_[v];
    av.erase(std::lower_bound(av.begin(), av.end(), u));
    --m_;
    return true;
}

Graph GraphBuilder::build() && {
    Graph g;
    g.n_ = n_;
    g.m_ = m_;
    g.adj_ = std::move(adj_);
    n_ = 0;
    m_ = 0;
    adj_.clear();
    return g;
}

Graph GraphBuilder::snapshot() const {
    Graph g;
    g.n_ = n_;
    g.m_ = m_;
    g.adj_ = adj_;
    return g;
}

NodeSet k_hop_nodes(const Graph& g, const NodeSet& seeds, int k) {
    if (seeds.empty()) throw std::invalid_argument("k_hop_nodes: empty seed set");
    if (k < 0) throw std::invalid_argument("k_hop_nodes: negative radius");
    std::vector<int> dist(static_cast<std::size_t>(g.num_nodes()), -1);
    std::deque<node_t> queue;
    for (node_t s : seeds) {
        if (s < 0 || s >= g.num_nodes()) throw std::out_of_range("k_hop_nodes: seed label out of range");
        dist[s] = 0;
        queue.push_back(s);
    }
    std::vector<node_t> out;
    while (!queue.empty()) {
        node_t v = queue.front();
        queue.pop_front();
        out.push_back(v);
        if (dist[v] == k) continue;
        for (node_t w : g.neighbors(v)) {
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return NodeSet(std::move(out));
}

NodeSet receptive_field(const Graph& g, node_t v, int k) {
    if (k < 0) throw std::invalid_argument("receptive_field: negative localization");
    return k_hop_nodes(g, NodeSet({v}), 2 * k + 1);
}

InducedSubgraph induced_subgraph(const Graph& g, const NodeSet& nodes) {
    std::vector<node_t> inverse(static_cast<std::size_t>(g.num_nodes()), -1);
    std::vector<node_t> label_map;
    label_map.reserve(nodes.size());
    for (node_t v : nodes) {
        if (v < 0 || v >= g.num_nodes()) throw std::out_of_range("induced_subgraph: label out of range");
        inverse[v] = static_cast<node_t>(label_map.size());
        label_map.push_back(v);
    }
    GraphBuilder b(static_cast<node_t>(label_map.size()));
    for (node_t v : nodes) {
        for (node_t w : g.neighbors(v)) {
            if (w > v && inverse[w] >= 0) b.add_edge(inverse[v], inverse[w]);
        }
    }
    return InducedSubgraph{std::move(b).build(), std::move(label_map)};
}

bool is_connected(const Graph& g) {
    if (g.num_nodes() <= 1) return true;
    NodeSet reached = k_hop_nodes(g, NodeSet({0}), g.num_nodes());
    return reached.size() == static_cast<std::size_t>(g.num_nodes());
}

}  // namespace netgrow
