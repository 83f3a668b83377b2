#include "infoflow/digraph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <tuple>
#include <numeric>

#include "infoflow/csv.hpp"

namespace infoflow {

namespace {

std::vector<NodeId> sorted_unique(std::vector<NodeId> nodes) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

std::optional<std::size_t> find_local(const std::vector<NodeId>& nodes, NodeId id) {
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), id);
    if (it == nodes.end() || *it != id)
        return std::nullopt;
    return static_cast<std::size_t>(it - nodes.begin());
}

struct LocalEdge {
    std::uint32_t u;
    std::uint32_t v;
    std::uint64_t w;
};

// Sorts, merges duplicates, and validates; returns local edges.
std::vector<LocalEdge> localise(const std::vector<NodeId>& nodes, std::span<const WeightedEdge> edges,
                                bool undirected) {
    std::vector<LocalEdge> local;
    local.reserve(edges.size());
    for (const auto& e : edges) {
        if (e.source == e.target)
            throw Error("self-loop on node " + std::to_string(e.source));
        if (e.weight == 0)
            throw Error("zero-weight edge " + std::to_string(e.source) + "->" + std::to_string(e.target));
        const auto u = find_local(nodes, e.source);
        const auto v = find_local(nodes, e.target);
        if (!u || !v)
            throw Error("edge endpoint not in node set: " + std::to_string(u ? e.target : e.source));
        auto a = static_cast<std::uint32_t>(*u);
        auto b = static_cast<std::uint32_t>(*v);
        if (undirected && a > b)
            std::swap(a, b);
        local.push_back({a, b, e.weight});
    }
    std::sort(local.begin(), local.end(),
              [](const LocalEdge& x, const LocalEdge& y) { return std::tie(x.u, x.v) < std::tie(y.u, y.v); });
    std::vector<LocalEdge> merged;
    merged.reserve(local.size());
    for (const auto& e : local) {
        if (!merged.empty() && merged.back().u == e.u && merged.back().v == e.v)
            merged.back().w += e.w;
        else
            merged.push_back(e);
    }
    return merged;
}

// Builds a CSR from (row, arc) pairs already sorted by row then target.
void build_csr(std::size_t n, const std::vector<std::pair<std::uint32_t, Arc>>& entries,
               std::vector<std::size_t>& offsets, std::vector<Arc>& arcs) {
    offsets.assign(n + 1, 0);
    for (const auto& [row, arc] : entries)
        ++offsets[row + 1];
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    arcs.resize(entries.size());
    std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
    for (const auto& [row, arc] : entries)
        arcs[fill[row]++] = arc;
}

std::uint64_t arc_weight(std::span<const Arc> arcs, std::size_t v) {
    const auto it = std::lower_bound(arcs.begin(), arcs.end(), v,
                                     [](const Arc& a, std::size_t t) { return a.target < t; });
    return it != arcs.end() && it->target == v ? it->weight : 0;
}

}  // namespace

DirectedGraph::DirectedGraph(std::vector<NodeId> nodes, std::span<const WeightedEdge> edges)
    : nodes_(sorted_unique(std::move(nodes))) {
    const auto local = localise(nodes_, edges, false);
    std::vector<std::pair<std::uint32_t, Arc>> out, in;
    out.reserve(local.size());
    in.reserve(local.size());
    for (const auto& e : local) {
        out.push_back({e.u, Arc{e.v, e.w}});
        in.push_back({e.v, Arc{e.u, e.w}});
        total_weight_ += e.w;
    }
    std::stable_sort(in.begin(), in.end(), [](const auto& a, const auto& b) {
        return std::tie(a.first, a.second.target) < std::tie(b.first, b.second.target);
    });
    build_csr(nodes_.size(), out, out_offsets_, out_);
    build_csr(nodes_.size(), in, in_offsets_, in_);
    edge_count_ = local.size();
}

DirectedGraph DirectedGraph::from_pairs(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges) {
    std::vector<NodeId> nodes(n);
    std::iota(nodes.begin(), nodes.end(), NodeId{0});
    std::vector<WeightedEdge> list;
    list.reserve(edges.size());
    for (const auto& [u, v] : edges)
        list.push_back({u, v, 1});
    return DirectedGraph(std::move(nodes), list);
}

std::optional<std::size_t> DirectedGraph::local_index(NodeId id) const {
    return find_local(nodes_, id);
}

std::uint64_t DirectedGraph::weight(std::size_t u, std::size_t v) const {
    return arc_weight(out_arcs(u), v);
}

std::vector<WeightedEdge> DirectedGraph::edges() const {
    std::vector<WeightedEdge> list;
    list.reserve(edge_count_);
    for (std::size_t u = 0; u < node_count(); ++u)
        for (const auto& a : out_arcs(u))
            list.push_back({nodes_[u], nodes_[a.target], a.weight});
    return list;
}

DirectedGraph DirectedGraph::reversed() const {
    auto list = edges();
    for (auto& e : list)
        std::swap(e.source, e.target);
    return DirectedGraph(nodes_, list);
}

bool operator==(const DirectedGraph& a, const DirectedGraph& b) {
    if (a.nodes_ != b.nodes_ || a.edge_count_ != b.edge_count_)
        return false;
    for (std::size_t u = 0; u < a.node_count(); ++u) {
        const auto x = a.out_arcs(u);
        const auto y = b.out_arcs(u);
        if (!std::equal(x.begin(), x.end(), y.begin(), y.end(),
                        [](const Arc& p, const Arc& q) { return p.target == q.target && p.weight == q.weight; }))
            return false;
    }
    return true;
}

UndirectedGraph::UndirectedGraph(std::vector<NodeId> nodes, std::span<const WeightedEdge> edges)
    : nodes_(sorted_unique(std::move(nodes))) {
    const auto local = localise(nodes_, edges, true);
    std::vector<std::pair<std::uint32_t, Arc>> entries;
    entries.reserve(2 * local.size());
    for (const auto& e : local) {
        entries.push_back({e.u, Arc{e.v, e.w}});
        entries.push_back({e.v, Arc{e.u, e.w}});
        total_weight_ += e.w;
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        return std::tie(a.first, a.second.target) < std::tie(b.first, b.second.target);
    });
    build_csr(nodes_.size(), entries, offsets_, adj_);
    edge_count_ = local.size();
}

UndirectedGraph UndirectedGraph::from_pairs(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges) {
    std::vector<NodeId> nodes(n);
    std::iota(nodes.begin(), nodes.end(), NodeId{0});
    std::vector<WeightedEdge> list;
    for (const auto& [u, v] : edges)
        list.push_back({u, v, 1});
    return UndirectedGraph(std::move(nodes), list);
}

std::optional<std::size_t> UndirectedGraph::local_index(NodeId id) const {
    return find_local(nodes_, id);
}

std::uint64_t UndirectedGraph::weight(std::size_t u, std::size_t v) const {
    return arc_weight(neighbors(u), v);
}

std::vector<WeightedEdge> UndirectedGraph::edges() const {
    std::vector<WeightedEdge> list;
    list.reserve(edge_count_);
    for (std::size_t u = 0; u < node_count(); ++u)
        for (const auto& a : neighbors(u))
            if (a.target > u)
                list.push_back({nodes_[u], nodes_[a.target], a.weight});
    return list;
}

SccLabels scc_labels(const DirectedGraph& g) {
    // Iterative Tarjan.
    constexpr auto kUnvisited = std::numeric_limits<std::uint32_t>::max();
    const std::size_t n = g.node_count();
    SccLabels result;
    result.component.assign(n, kUnvisited);
    std::vector<std::uint32_t> index(n, kUnvisited), lowlink(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::uint32_t> stack;
    struct Frame {
        std::uint32_t node;
        std::size_t next_arc;
    };
    std::vector<Frame> call;
    std::uint32_t counter = 0;

    for (std::uint32_t root = 0; root < n; ++root) {
        if (index[root] != kUnvisited)
            continue;
        call.push_back({root, 0});
        index[root] = lowlink[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            auto& frame = call.back();
            const auto arcs = g.out_arcs(frame.node);
            if (frame.next_arc < arcs.size()) {
                const std::uint32_t w = arcs[frame.next_arc++].target;
                if (index[w] == kUnvisited) {
                    index[w] = lowlink[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    lowlink[frame.node] = std::min(lowlink[frame.node], index[w]);
                }
                continue;
            }
            const std::uint32_t v = frame.node;
            call.pop_back();
            if (!call.empty())
                lowlink[call.back().node] = std::min(lowlink[call.back().node], lowlink[v]);
            if (lowlink[v] == index[v]) {
                std::uint32_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    result.component[w] = result.count;
                } while (w != v);
                ++result.count;
            }
        }
    }
    return result;
}

namespace {

ComponentList group_by_label(const DirectedGraph& g, const std::vector<std::uint32_t>& label,
                             std::uint32_t count) {
    ComponentList components(count);
    for (std::size_t v = 0; v < g.node_count(); ++v)
        components[label[v]].push_back(g.node_id(v));
    // members are already ascending because nodes are visited in id order
    std::sort(components.begin(), components.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return components;
}

}  // namespace

ComponentList strongly_connected_components(const DirectedGraph& g) {
    const auto labels = scc_labels(g);
    return group_by_label(g, labels.component, labels.count);
}

ComponentList weakly_connected_components(const DirectedGraph& g) {
    const std::size_t n = g.node_count();
    std::vector<std::uint32_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (std::size_t u = 0; u < n; ++u)
        for (const auto& a : g.out_arcs(u)) {
            const auto ru = find(static_cast<std::uint32_t>(u));
            const auto rv = find(a.target);
            if (ru != rv)
                parent[std::max(ru, rv)] = std::min(ru, rv);
        }
    std::vector<std::uint32_t> label(n);
    std::vector<std::uint32_t> root_label(n, std::numeric_limits<std::uint32_t>::max());
    std::uint32_t count = 0;
    for (std::uint32_t v = 0; v < n; ++v) {
        const auto r = find(v);
        if (root_label[r] == std::numeric_limits<std::uint32_t>::max())
            root_label[r] = count++;
        label[v] = root_label[r];
    }
    return group_by_label(g, label, count);
}

DirectedGraph induced_subgraph(const DirectedGraph& g, std::span<const NodeId> nodes) {
    std::vector<NodeId> keep(nodes.begin(), nodes.end());
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    std::vector<bool> inside(g.node_count(), false);
    for (NodeId id : keep) {
        const auto local = g.local_index(id);
        if (!local)
            throw Error("induced_subgraph: unknown node " + std::to_string(id));
        inside[*local] = true;
    }
    std::vector<WeightedEdge> edges;
    for (std::size_t u = 0; u < g.node_count(); ++u) {
        if (!inside[u])
            continue;
        for (const auto& a : g.out_arcs(u))
            if (inside[a.target])
                edges.push_back({g.node_id(u), g.node_id(a.target), a.weight});
    }
    return DirectedGraph(std::move(keep), edges);
}

std::string numeric_name(NodeId id) {
    return std::to_string(id);
}

NodeId numeric_id(std::string_view name) {
    NodeId id = 0;
    const auto res = std::from_chars(name.data(), name.data() + name.size(), id);
    if (res.ec != std::errc() || res.ptr != name.data() + name.size())
        throw Error("not a node id: '" + std::string(name) + "'");
    return id;
}

void write_edge_list(const DirectedGraph& g, const std::filesystem::path& path, const NodeNamer& name) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path.string());
    out << "src,dst,weight\n";
    for (const auto& e : g.edges())
        out << csv_escape(name(e.source)) << ',' << csv_escape(name(e.target)) << ',' << e.weight << '\n';
    if (!out)
        throw Error("write failed: " + path.string());
}

DirectedGraph read_edge_list(const std::filesystem::path& path, const NodeResolver& resolve,
                             std::span<const NodeId> extra_nodes) {
    CsvReader reader(path);
    std::vector<NodeId> nodes(extra_nodes.begin(), extra_nodes.end());
    std::vector<WeightedEdge> edges;
    if (reader.has_header()) {
        const auto src = reader.require_column("src");
        const auto dst = reader.require_column("dst");
        const auto wcol = reader.column("weight");
        std::vector<std::string> f;
        while (reader.next(f)) {
            WeightedEdge e;
            try {
                e.source = resolve(f[src]);
                e.target = resolve(f[dst]);
                if (wcol && !f[*wcol].empty()) {
                    const auto& w = f[*wcol];
                    const auto res = std::from_chars(w.data(), w.data() + w.size(), e.weight);
                    if (res.ec != std::errc() || res.ptr != w.data() + w.size() || e.weight == 0)
                        reader.fail("bad weight '" + w + "'");
                }
            } catch (const ParseError&) {
                throw;
            } catch (const Error& err) {
                reader.fail(err.what());
            }
            if (e.source == e.target)
                reader.fail("self-loop");
            nodes.push_back(e.source);
            nodes.push_back(e.target);
            edges.push_back(e);
        }
    }
    return DirectedGraph(std::move(nodes), edges);
}

}  // namespace infoflow
