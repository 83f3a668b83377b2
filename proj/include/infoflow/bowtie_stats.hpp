#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "infoflow/bowtie.hpp"
#include "infoflow/ingest.hpp"
#include "infoflow/nullmodels.hpp"

namespace infoflow {

template <class T>
using PerSector = std::array<T, kSectorCount>;

template <class T>
using SectorMatrix = std::array<std::array<T, kSectorCount>, kSectorCount>;

struct EnsembleOptions {
    std::size_t samples = 1000;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    SolverOptions solver;
};

/// Sector sizes of every ensemble draw.
struct SectorSizeDistributions {
    std::size_t sample_count = 0;
    std::uint64_t seed = 0;
    PerSector<std::vector<std::uint32_t>> sizes;
};

struct BlockTest {
    SectorSizes observed{};
    SectorSizeDistributions ensemble;
    PerSector<double> pvalue{};
    double fit_residual = 0.0;

    double ensemble_mean(Sector s) const;
};

/// Empirical two-tailed p-value with the add-one estimator:
/// min(1, 2 min((1 + #{x <= obs}) / (S + 1), (1 + #{x >= obs}) / (S + 1))).
double two_tailed_pvalue(std::span<const std::uint32_t> ensemble, std::size_t observed);

/// Fits a DCM to the community's (unweighted) degrees, decomposes `samples`
/// draws and tests each observed sector size. Draw k uses the substream
/// (seed, "ensemble", k), so results do not depend on thread count.
/// Throws Error when samples < 100; fit errors propagate.
BlockTest ensemble_block_pvalues(const DirectedGraph& community, const EnsembleOptions& options);

/// Benjamini-Hochberg over the seven sector hypotheses.
PerSector<bool> fdr_blocks(const PerSector<double>& pvalues, double alpha = 0.01);

enum class Strength { Strong, Weak, None };
enum class Dominance { OutDominant, IntendDominant, Other, None };

enum class InformativeRule {
    /// Non-OTHERS nodes are at least half of the community.
    Majority,
    /// Non-OTHERS nodes are at least a tenth of OTHERS (same order of magnitude).
    SameOrder,
};

struct BowTieClass {
    bool informative = false;
    Strength strength = Strength::None;
    Dominance dominance = Dominance::None;
    /// Largest non-OTHERS sector when it is unique.
    std::optional<Sector> dominant_sector;
    /// Two or more non-OTHERS sectors share the maximum.
    bool dominance_tie = false;
};

BowTieClass classify_bowtie(const SectorSizes& sizes, InformativeRule rule = InformativeRule::Majority);
inline BowTieClass classify_bowtie(const BowTiePartition& p, InformativeRule rule = InformativeRule::Majority) {
    return classify_bowtie(p.sizes(), rule);
}

std::string_view strength_name(Strength s);
std::string_view dominance_name(Dominance d);

struct SectorStats {
    PerSector<std::size_t> nodes{};
    PerSector<std::size_t> verified{};
    /// Percentage of the community's verified accounts found in each sector.
    PerSector<double> verified_share{};
    /// Percentage of each sector's nodes that are verified.
    PerSector<double> verified_fraction{};

    double scc_node_share = 0.0;   // percent of community nodes
    double scc_edge_share = 0.0;   // percent of community edges inside SCC
    double scc_density = 0.0;      // edges / (n (n - 1)) inside SCC

    std::uint64_t total_weight = 0;
    SectorMatrix<std::uint64_t> edges{};      // [source sector][target sector]
    SectorMatrix<std::uint64_t> weight{};
    SectorMatrix<std::uint64_t> untrusted{};  // retweets with an untrusted URL
    /// untrusted / total community weight, in percent.
    SectorMatrix<double> untrusted_share{};
    std::uint64_t untrusted_total = 0;
};

SectorStats sector_stats(const DirectedGraph& community, const BowTiePartition& partition,
                         const AccountTable& accounts, const UrlAnnotations& urls);

}  // namespace infoflow
