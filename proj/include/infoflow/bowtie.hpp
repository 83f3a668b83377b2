#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "infoflow/digraph.hpp"

namespace infoflow {

enum class Sector : std::uint8_t {
    Scc,
    In,
    Out,
    Tubes,
    InTendrils,
    OutTendrils,
    Others,
};

inline constexpr std::size_t kSectorCount = 7;

inline constexpr std::array<Sector, kSectorCount> kAllSectors = {
    Sector::Scc,        Sector::In,          Sector::Out,    Sector::Tubes,
    Sector::InTendrils, Sector::OutTendrils, Sector::Others,
};

std::string_view sector_name(Sector s);
std::optional<Sector> parse_sector(std::string_view name);

constexpr std::size_t index_of(Sector s) { return static_cast<std::size_t>(s); }

using SectorSizes = std::array<std::size_t, kSectorCount>;

/// Seven-sector bow-tie assignment of a directed graph.
class BowTiePartition {
public:
    BowTiePartition() = default;
    BowTiePartition(std::vector<NodeId> nodes, std::vector<Sector> sectors);

    std::span<const NodeId> nodes() const noexcept { return nodes_; }
    /// Sector by local index (same indexing as the decomposed graph).
    Sector sector_at(std::size_t local) const { return sectors_[local]; }
    std::span<const Sector> sectors() const noexcept { return sectors_; }
    /// Throws Error for ids outside the partition.
    Sector sector_of(NodeId id) const;

    const SectorSizes& sizes() const noexcept { return sizes_; }
    std::size_t size(Sector s) const { return sizes_[index_of(s)]; }
    std::size_t node_count() const noexcept { return nodes_.size(); }

    std::vector<NodeId> members(Sector s) const;

private:
    std::vector<NodeId> nodes_;
    std::vector<Sector> sectors_;
    SectorSizes sizes_{};
};

/// Decomposes g around its largest strongly connected component.
///
/// Ties on size go to the component with more internal edges, then to the
/// one with the smallest member id. Remaining sectors follow from plain
/// (unweighted) reachability:
///   IN     reaches the core;  OUT is reached from it;
///   TUBES  reachable from IN and reaching OUT;
///   INTENDRILS reachable from IN only;  OUTTENDRILS reaching OUT only;
///   OTHERS everything else.
/// Throws Error on an empty graph.
BowTiePartition bowtie_decompose(const DirectedGraph& g);

/// Sector sizes only; same result as bowtie_decompose(g).sizes() with less
/// allocation, for the ensemble loop.
SectorSizes bowtie_sizes(const DirectedGraph& g);

/// "node,sector" table.
void write_partition(const BowTiePartition& p, const std::filesystem::path& path,
                     const NodeNamer& name = numeric_name);

}  // namespace infoflow
