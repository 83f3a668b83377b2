#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <vector>

#include "infoflow/digraph.hpp"
#include "infoflow/nullmodels.hpp"

namespace infoflow {

using Label = std::uint32_t;
inline constexpr Label kUnassigned = std::numeric_limits<Label>::max();

/// Community per local node index; ids are contiguous from 0 and numbered
/// in order of each community's first node.
struct Partition {
    std::vector<std::uint32_t> community;
    std::uint32_t count = 0;
};

/// Renumbers arbitrary ids to the contiguous first-appearance convention.
Partition normalized_partition(std::span<const std::uint32_t> ids);

/// Q = (1/2m) sum_{i != j} (a_ij - p_ij) [C_i == C_j] with p_ij from the UCM.
/// Q is 0 for a graph without edges. Throws Error on size mismatches.
double modularity_ucm(const UndirectedGraph& g, const Partition& partition, const UcmFit& fit);

/// Louvain optimisation of modularity_ucm: local moves in seeded random
/// order, then aggregation, until no move improves Q by more than 1e-12.
/// Returns the all-in-one partition when the result does not beat it.
Partition louvain_ucm(const UndirectedGraph& g, const UcmFit& fit, std::uint64_t seed);

struct LabelAssignment {
    std::vector<NodeId> nodes;       // digraph order
    std::vector<Label> label;        // kUnassigned when never labelled
    std::vector<double> frequency;   // share of runs that produced `label`

    std::size_t unassigned() const;
};

struct LpaOptions {
    std::size_t runs = 500;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    /// Neighbour votes weighted by retweet count; false counts each neighbour once.
    bool weighted = true;
    /// Per-run cap on full sweeps.
    std::size_t max_sweeps = 1000;
};

/// Label propagation on the undirected view of `g` with fixed seeds.
///
/// Each run sweeps the unseeded nodes in random order; a node takes the
/// label with the largest vote among labelled neighbours. On a tie one of
/// its incident edges, chosen uniformly, is dropped for that node for the
/// rest of the run and the vote is repeated. A run ends after a sweep with
/// no change. The result is each node's most frequent label across runs.
/// Throws Error on an empty seed map or seeds outside g.
LabelAssignment seeded_label_propagation(const DirectedGraph& g, const std::map<NodeId, Label>& seeds,
                                         const LpaOptions& options);

struct Community {
    Label label;
    DirectedGraph graph;
};

struct CrossCount {
    std::uint64_t edges = 0;
    std::uint64_t weight = 0;
};

struct CommunitySplit {
    std::vector<Community> communities;  // ascending label
    std::size_t unassigned_nodes = 0;
    /// Edges whose endpoints carry different labels, keyed (source, target).
    std::map<std::pair<Label, Label>, CrossCount> cross;
    /// Edges with at least one unassigned endpoint.
    CrossCount touching_unassigned;

    std::uint64_t cross_edges() const;
};

CommunitySplit extract_communities(const DirectedGraph& g, const LabelAssignment& labels);

/// "node,label,frequency"; unassigned nodes have an empty label.
void write_labels(const LabelAssignment& labels, const std::filesystem::path& path, const NodeNamer& name);

}  // namespace infoflow
