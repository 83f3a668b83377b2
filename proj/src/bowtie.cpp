#include "infoflow/bowtie.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include "infoflow/csv.hpp"

namespace infoflow {

namespace {

constexpr std::array<std::string_view, kSectorCount> kSectorNames = {
    "SCC", "IN", "OUT", "TUBES", "INTENDRILS", "OUTTENDRILS", "OTHERS",
};

// Index of the core component under the documented tie-break.
std::uint32_t pick_core(const DirectedGraph& g, const SccLabels& scc) {
    std::vector<std::size_t> size(scc.count, 0), internal(scc.count, 0);
    std::vector<NodeId> min_id(scc.count, std::numeric_limits<NodeId>::max());
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        const auto c = scc.component[v];
        ++size[c];
        min_id[c] = std::min(min_id[c], g.node_id(v));
        for (const auto& a : g.out_arcs(v))
            if (scc.component[a.target] == c)
                ++internal[c];
    }
    std::uint32_t best = 0;
    for (std::uint32_t c = 1; c < scc.count; ++c) {
        const auto key = [&](std::uint32_t x) {
            // larger is better on the first two, smaller id wins the last
            return std::make_tuple(size[x], internal[x], std::numeric_limits<NodeId>::max() - min_id[x]);
        };
        if (key(c) > key(best))
            best = c;
    }
    return best;
}

// Marks everything reachable from the seeds (seeds included).
void flood(const DirectedGraph& g, bool forward, const std::vector<std::uint32_t>& seeds,
           std::vector<bool>& seen) {
    std::vector<std::uint32_t> queue(seeds);
    for (auto s : seeds)
        seen[s] = true;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const auto v = queue[head];
        for (const auto& a : forward ? g.out_arcs(v) : g.in_arcs(v))
            if (!seen[a.target]) {
                seen[a.target] = true;
                queue.push_back(a.target);
            }
    }
}

std::vector<Sector> assign_sectors(const DirectedGraph& g) {
    if (g.empty())
        throw Error("bowtie_decompose: empty graph");
    const std::size_t n = g.node_count();
    const auto scc = scc_labels(g);
    const auto core = pick_core(g, scc);

    std::vector<std::uint32_t> core_nodes;
    for (std::uint32_t v = 0; v < n; ++v)
        if (scc.component[v] == core)
            core_nodes.push_back(v);

    std::vector<bool> from_core(n, false), to_core(n, false);
    flood(g, true, core_nodes, from_core);
    flood(g, false, core_nodes, to_core);

    std::vector<Sector> sector(n, Sector::Others);
    std::vector<std::uint32_t> in_nodes, out_nodes;
    for (std::uint32_t v = 0; v < n; ++v) {
        if (scc.component[v] == core) {
            sector[v] = Sector::Scc;
        } else if (to_core[v]) {
            sector[v] = Sector::In;
            in_nodes.push_back(v);
        } else if (from_core[v]) {
            sector[v] = Sector::Out;
            out_nodes.push_back(v);
        }
    }

    // Paths from IN to a leftover node, or from a leftover node to OUT,
    // can never pass through the core (the node would then be IN or OUT),
    // so plain floods over the whole graph are exact.
    std::vector<bool> from_in(n, false), to_out(n, false);
    flood(g, true, in_nodes, from_in);
    flood(g, false, out_nodes, to_out);
    for (std::uint32_t v = 0; v < n; ++v) {
        if (sector[v] != Sector::Others)
            continue;
        if (from_in[v] && to_out[v])
            sector[v] = Sector::Tubes;
        else if (from_in[v])
            sector[v] = Sector::InTendrils;
        else if (to_out[v])
            sector[v] = Sector::OutTendrils;
    }
    return sector;
}

}  // namespace

std::string_view sector_name(Sector s) {
    return kSectorNames[index_of(s)];
}

std::optional<Sector> parse_sector(std::string_view name) {
    const auto upper = to_lower(trim(name));
    for (auto s : kAllSectors)
        if (to_lower(kSectorNames[index_of(s)]) == upper)
            return s;
    return std::nullopt;
}

BowTiePartition::BowTiePartition(std::vector<NodeId> nodes, std::vector<Sector> sectors)
    : nodes_(std::move(nodes)), sectors_(std::move(sectors)) {
    if (nodes_.size() != sectors_.size())
        throw Error("BowTiePartition: node and sector counts differ");
    for (auto s : sectors_)
        ++sizes_[index_of(s)];
}

Sector BowTiePartition::sector_of(NodeId id) const {
    const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id);
    if (it == nodes_.end() || *it != id)
        throw Error("node " + std::to_string(id) + " not in partition");
    return sectors_[static_cast<std::size_t>(it - nodes_.begin())];
}

std::vector<NodeId> BowTiePartition::members(Sector s) const {
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (sectors_[i] == s)
            out.push_back(nodes_[i]);
    return out;
}

BowTiePartition bowtie_decompose(const DirectedGraph& g) {
    auto sectors = assign_sectors(g);
    return BowTiePartition(std::vector<NodeId>(g.nodes().begin(), g.nodes().end()), std::move(sectors));
}

SectorSizes bowtie_sizes(const DirectedGraph& g) {
    SectorSizes sizes{};
    for (auto s : assign_sectors(g))
        ++sizes[index_of(s)];
    return sizes;
}

void write_partition(const BowTiePartition& p, const std::filesystem::path& path, const NodeNamer& name) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path.string());
    out << "node,sector\n";
    for (std::size_t i = 0; i < p.node_count(); ++i)
        out << csv_escape(name(p.nodes()[i])) << ',' << sector_name(p.sector_at(i)) << '\n';
    if (!out)
        throw Error("write failed: " + path.string());
}

}  // namespace infoflow
