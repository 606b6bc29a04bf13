// graph.hpp — undirected simple graphs with sorted adjacency lists.
//
// Graph values are immutable once built; GraphBuilder owns the mutable state
// during construction. Nodes are contiguous integers in [0, n).
#ifndef NETGROW_GRAPH_HPP_
#define NETGROW_GRAPH_HPP_

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace netgrow {

using node_t = std::int32_t;
using Edge = std::pair<node_t, node_t>;  // canonical: first < second

// Strictly increasing list of node labels.
class NodeSet {
  public:
    NodeSet() = default;
    explicit NodeSet(std::vector<node_t> sorted_unique);
    static NodeSet from_unsorted(std::vector<node_t> nodes);

    bool contains(node_t v) const;
    std::size_t size() const { return nodes_.size(); }
    bool empty() const { return nodes_.empty(); }
    const std::vector<node_t>& values() const { return nodes_; }
    auto begin() const { return nodes_.begin(); }
    auto end() const { return nodes_.end(); }
    bool operator==(const NodeSet& other) const { return nodes_ == other.nodes_; }

  private:
    std::vector<node_t> nodes_;
};

class GraphBuilder;

class Graph {
  public:
    Graph() = default;

    node_t num_nodes() const { return n_; }
    std::size_t num_edges() const { return m_; }
    int degree(node_t v) const;
    const std::vector<node_t>& neighbors(node_t v) const;
    bool has_edge(node_t u, node_t v) const;
    const std::vector<std::vector<node_t>>& adjacency() const { return adj_; }

    // Edges in canonical order: u < v, lexicographic.
    std::vector<Edge> edges() const;

    std::vector<int> degrees() const;

    bool operator==(const Graph& other) const { return n_ == other.n_ && adj_ == other.adj_; }

  private:
    friend class GraphBuilder;
    node_t n_ = 0;
    std::size_t m_ = 0;
    std::vector<std::vector<node_t>> adj_;
};

// Mutable companion of Graph used by the simulators and parsers.
class GraphBuilder {
  public:
    GraphBuilder() = default;
    explicit GraphBuilder(node_t n);
    explicit GraphBuilder(const Graph& g);

    node_t num_nodes() const { return n_; }
    std::size_t num_edges() const { return m_; }
    int degree(node_t v) const;
    const std::vector<node_t>& neighbors(node_t v) const;
    bool has_edge(node_t u, node_t v) const;
    const std::vector<std::vector<node_t>>& adjacency() const { return adj_; }

    // Appends a new isolated node and returns its label.
    node_t add_node();

    // Returns true if the edge was newly inserted, false if already present.
    // Throws std::invalid_argument on self-loops, std::out_of_range on bad labels.
    bool add_edge(node_t u, node_t v);

    // Returns true if the edge was present and removed.
    bool remove_edge(node_t u, node_t v);

    Graph build() &&;
    Graph snapshot() const;

  private:
    void check_node(node_t v) const;
    node_t n_ = 0;
    std::size_t m_ = 0;
    std::vector<std::vector<node_t>> adj_;
};

// All nodes at BFS distance <= k from any seed.
NodeSet k_hop_nodes(const Graph& g, const NodeSet& seeds, int k);

// The (2k+1)-hop ball around v.
NodeSet receptive_field(const Graph& g, node_t v, int k);

struct InducedSubgraph {
    Graph graph;
    std::vector<node_t> label_map;  // new label -> original label
};

InducedSubgraph induced_subgraph(const Graph& g, const NodeSet& nodes);

bool is_connected(const Graph& g);

}  // namespace netgrow

#endif  // NETGROW_GRAPH_HPP_
