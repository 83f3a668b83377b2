#include "infoflow/bowtie_stats.hpp"

#include <algorithm>
#include <numeric>

#include "infoflow/parallel.hpp"
#include "infoflow/projection.hpp"
#include "infoflow/random.hpp"

namespace infoflow {

double BlockTest::ensemble_mean(Sector s) const {
    const auto& xs = ensemble.sizes[index_of(s)];
    if (xs.empty())
        return 0.0;
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double two_tailed_pvalue(std::span<const std::uint32_t> ensemble, std::size_t observed) {
    std::size_t below = 0, above = 0;
    for (auto x : ensemble) {
        below += x <= observed;
        above += x >= observed;
    }
    const double s1 = static_cast<double>(ensemble.size()) + 1.0;
    const double tail = std::min((1.0 + static_cast<double>(below)) / s1, (1.0 + static_cast<double>(above)) / s1);
    return std::min(1.0, 2.0 * tail);
}

BlockTest ensemble_block_pvalues(const DirectedGraph& community, const EnsembleOptions& options) {
    if (options.samples < 100)
        throw Error("ensemble needs at least 100 samples, got " + std::to_string(options.samples));
    BlockTest test;
    test.observed = bowtie_sizes(community);
    const auto fit = fit_dcm(degrees_of(community), options.solver);
    test.fit_residual = fit.report.residual;

    test.ensemble.sample_count = options.samples;
    test.ensemble.seed = options.seed;
    for (auto& xs : test.ensemble.sizes)
        xs.assign(options.samples, 0);
    parallel_for(options.samples, options.threads, [&](std::size_t k) {
        const auto draw = sample_dcm(fit, substream_seed(options.seed, "ensemble", k));
        const auto sizes = bowtie_sizes(draw);
        for (std::size_t s = 0; s < kSectorCount; ++s)
            test.ensemble.sizes[s][k] = static_cast<std::uint32_t>(sizes[s]);
    });
    for (std::size_t s = 0; s < kSectorCount; ++s)
        test.pvalue[s] = two_tailed_pvalue(test.ensemble.sizes[s], test.observed[s]);
    return test;
}

PerSector<bool> fdr_blocks(const PerSector<double>& pvalues, double alpha) {
    PerSector<bool> significant{};
    for (auto k : fdr_reject(pvalues, kSectorCount, alpha))
        significant[k] = true;
    return significant;
}

BowTieClass classify_bowtie(const SectorSizes& sizes, InformativeRule rule) {
    BowTieClass cls;
    const std::size_t others = sizes[index_of(Sector::Others)];
    const std::size_t total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
    const std::size_t core = total - others;
    cls.informative = rule == InformativeRule::Majority ? 2 * core >= total && total > 0
                                                        : core > 0 && 10 * core >= others;
    if (!cls.informative)
        return cls;
    cls.strength = others < sizes[index_of(Sector::Scc)] ? Strength::Strong : Strength::Weak;

    std::size_t largest = 0, count = 0;
    Sector arg = Sector::Scc;
    for (auto s : kAllSectors) {
        if (s == Sector::Others)
            continue;
        const auto x = sizes[index_of(s)];
        if (x > largest) {
            largest = x;
            arg = s;
            count = 1;
        } else if (x == largest) {
            ++count;
        }
    }
    cls.dominance_tie = count > 1;
    if (cls.dominance_tie) {
        cls.dominance = Dominance::Other;
        return cls;
    }
    cls.dominant_sector = arg;
    cls.dominance = arg == Sector::Out ? Dominance::OutDominant
                  : arg == Sector::InTendrils ? Dominance::IntendDominant
                                              : Dominance::Other;
    return cls;
}

std::string_view strength_name(Strength s) {
    switch (s) {
    case Strength::Strong: return "strong";
    case Strength::Weak: return "weak";
    case Strength::None: break;
    }
    return "none";
}

std::string_view dominance_name(Dominance d) {
    switch (d) {
    case Dominance::OutDominant: return "OUT-dominant";
    case Dominance::IntendDominant: return "INTEND-dominant";
    case Dominance::Other: return "other";
    case Dominance::None: break;
    }
    return "none";
}

SectorStats sector_stats(const DirectedGraph& community, const BowTiePartition& partition,
                         const AccountTable& accounts, const UrlAnnotations& urls) {
    if (partition.node_count() != community.node_count())
        throw Error("sector_stats: partition does not match the community");
    SectorStats st;
    std::size_t verified_total = 0;
    for (std::size_t v = 0; v < community.node_count(); ++v) {
        if (partition.nodes()[v] != community.node_id(v))
            throw Error("sector_stats: partition does not match the community");
        const auto s = index_of(partition.sector_at(v));
        ++st.nodes[s];
        if (accounts[community.node_id(v)].verified) {
            ++st.verified[s];
            ++verified_total;
        }
    }
    for (std::size_t s = 0; s < kSectorCount; ++s) {
        if (verified_total > 0)
            st.verified_share[s] = 100.0 * static_cast<double>(st.verified[s]) / static_cast<double>(verified_total);
        if (st.nodes[s] > 0)
            st.verified_fraction[s] = 100.0 * static_cast<double>(st.verified[s]) / static_cast<double>(st.nodes[s]);
    }

    for (std::size_t u = 0; u < community.node_count(); ++u) {
        const auto su = index_of(partition.sector_at(u));
        for (const auto& a : community.out_arcs(u)) {
            const auto sv = index_of(partition.sector_at(a.target));
            ++st.edges[su][sv];
            st.weight[su][sv] += a.weight;
            st.total_weight += a.weight;
            const auto it = urls.find({community.node_id(u), community.node_id(a.target)});
            if (it != urls.end()) {
                const auto bad = std::min(it->second.untrusted_retweets, a.weight);
                st.untrusted[su][sv] += bad;
                st.untrusted_total += bad;
            }
        }
    }
    if (st.total_weight > 0)
        for (std::size_t a = 0; a < kSectorCount; ++a)
            for (std::size_t b = 0; b < kSectorCount; ++b)
                st.untrusted_share[a][b] =
                    100.0 * static_cast<double>(st.untrusted[a][b]) / static_cast<double>(st.total_weight);

    const auto scc = index_of(Sector::Scc);
    const double n = static_cast<double>(community.node_count());
    const double scc_nodes = static_cast<double>(st.nodes[scc]);
    if (n > 0)
        st.scc_node_share = 100.0 * scc_nodes / n;
    if (community.edge_count() > 0)
        st.scc_edge_share = 100.0 * static_cast<double>(st.edges[scc][scc]) / static_cast<double>(community.edge_count());
    if (scc_nodes > 1)
        st.scc_density = static_cast<double>(st.edges[scc][scc]) / (scc_nodes * (scc_nodes - 1.0));
    return st;
}

}  // namespace infoflow
