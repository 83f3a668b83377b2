#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <optional>
#include <span>
#include <vector>

#include "infoflow/common.hpp"

namespace infoflow {

/// Weighted arc stored in adjacency lists; `target` is a local index.
struct Arc {
    std::uint32_t target;
    std::uint64_t weight;
};

struct WeightedEdge {
    NodeId source;
    NodeId target;
    std::uint64_t weight = 1;
};

/// Immutable directed graph without self-loops.
///
/// Nodes carry global NodeIds and are stored in ascending id order; the
/// position in that order is the node's local index, which all algorithms
/// use internally. Parallel edges passed to the constructor are merged by
/// summing their weights.
class DirectedGraph {
public:
    DirectedGraph() = default;

    /// Throws Error on self-loops, zero weights, or endpoints not in `nodes`.
    DirectedGraph(std::vector<NodeId> nodes, std::span<const WeightedEdge> edges);

    /// Convenience: nodes 0..n-1, unit weights.
    static DirectedGraph from_pairs(std::size_t n,
                                    std::span<const std::pair<NodeId, NodeId>> edges);

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t edge_count() const noexcept { return edge_count_; }
    std::uint64_t total_weight() const noexcept { return total_weight_; }
    bool empty() const noexcept { return nodes_.empty(); }

    std::span<const NodeId> nodes() const noexcept { return nodes_; }
    NodeId node_id(std::size_t local) const { return nodes_[local]; }
    std::optional<std::size_t> local_index(NodeId id) const;

    std::span<const Arc> out_arcs(std::size_t local) const {
        return {out_.data() + out_offsets_[local], out_.data() + out_offsets_[local + 1]};
    }
    std::span<const Arc> in_arcs(std::size_t local) const {
        return {in_.data() + in_offsets_[local], in_.data() + in_offsets_[local + 1]};
    }
    std::size_t out_degree(std::size_t local) const { return out_offsets_[local + 1] - out_offsets_[local]; }
    std::size_t in_degree(std::size_t local) const { return in_offsets_[local + 1] - in_offsets_[local]; }

    /// Weight of the arc local u -> local v, 0 when absent.
    std::uint64_t weight(std::size_t u, std::size_t v) const;

    /// All edges in (source, target) id order.
    std::vector<WeightedEdge> edges() const;

    /// Same nodes, every edge reversed.
    DirectedGraph reversed() const;

    friend bool operator==(const DirectedGraph& a, const DirectedGraph& b);

private:
    std::vector<NodeId> nodes_;
    std::vector<std::size_t> out_offsets_{0};
    std::vector<Arc> out_;
    std::vector<std::size_t> in_offsets_{0};
    std::vector<Arc> in_;
    std::size_t edge_count_ = 0;
    std::uint64_t total_weight_ = 0;
};

/// Simple undirected graph with integer weights; no self-loops.
class UndirectedGraph {
public:
    UndirectedGraph() = default;
    /// Edges (a,b) and (b,a) are the same edge; duplicates are merged.
    UndirectedGraph(std::vector<NodeId> nodes, std::span<const WeightedEdge> edges);

    static UndirectedGraph from_pairs(std::size_t n,
                                      std::span<const std::pair<NodeId, NodeId>> edges);

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t edge_count() const noexcept { return edge_count_; }
    std::uint64_t total_weight() const noexcept { return total_weight_; }

    std::span<const NodeId> nodes() const noexcept { return nodes_; }
    NodeId node_id(std::size_t local) const { return nodes_[local]; }
    std::optional<std::size_t> local_index(NodeId id) const;

    std::span<const Arc> neighbors(std::size_t local) const {
        return {adj_.data() + offsets_[local], adj_.data() + offsets_[local + 1]};
    }
    std::size_t degree(std::size_t local) const { return offsets_[local + 1] - offsets_[local]; }
    std::uint64_t weight(std::size_t u, std::size_t v) const;

    /// Each edge once, with source < target by id.
    std::vector<WeightedEdge> edges() const;

private:
    std::vector<NodeId> nodes_;
    std::vector<std::size_t> offsets_{0};
    std::vector<Arc> adj_;
    std::size_t edge_count_ = 0;
    std::uint64_t total_weight_ = 0;
};

using ComponentList = std::vector<std::vector<NodeId>>;

/// Maximal strongly connected sets. Each component is sorted by id; the
/// list is ordered by smallest member id.
ComponentList strongly_connected_components(const DirectedGraph& g);

/// Per-node SCC index (local indexing) plus component count; used by the
/// bow-tie code to avoid materialising id lists.
struct SccLabels {
    std::vector<std::uint32_t> component;
    std::uint32_t count = 0;
};
SccLabels scc_labels(const DirectedGraph& g);

/// Components of the underlying undirected graph, same ordering as above.
ComponentList weakly_connected_components(const DirectedGraph& g);

/// Subgraph on `nodes` keeping every edge with both endpoints inside, with
/// weights. Throws Error when a node is not in g.
DirectedGraph induced_subgraph(const DirectedGraph& g, std::span<const NodeId> nodes);

/// Maps NodeIds to the names written in exchange files and back. The
/// default prints and parses the numeric id.
using NodeNamer = std::function<std::string(NodeId)>;
using NodeResolver = std::function<NodeId(std::string_view)>;

std::string numeric_name(NodeId id);
NodeId numeric_id(std::string_view name);

/// Edge list exchange: header "src,dst,weight".
void write_edge_list(const DirectedGraph& g, const std::filesystem::path& path,
                     const NodeNamer& name = numeric_name);
/// Nodes are the union of edge endpoints plus `extra_nodes`.
DirectedGraph read_edge_list(const std::filesystem::path& path,
                             const NodeResolver& resolve = numeric_id,
                             std::span<const NodeId> extra_nodes = {});

}  // namespace infoflow
