#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "infoflow/digraph.hpp"
#include "infoflow/ingest.hpp"
#include "infoflow/nullmodels.hpp"

namespace infoflow {

/// P(V >= n) for V a sum of independent Bernoulli(probs[k]). Exact
/// convolution truncated at n; tiny tails keep full relative precision.
/// Throws Error when a probability is outside [0,1] or n > probs.size().
double poisson_binomial_tail(std::span<const double> probs, std::size_t n);

/// Full pmf, P(V = k) for k = 0..probs.size().
std::vector<double> poisson_binomial_pmf(std::span<const double> probs);

/// Co-neighbour count V_ij for a pair of top-layer nodes (local indices, i < j).
struct VMotifCount {
    std::uint32_t i;
    std::uint32_t j;
    std::uint32_t count;
};

/// All pairs with V_ij > 0, ordered by (i, j).
std::vector<VMotifCount> vmotif_counts(const BipartiteGraph& g);

struct PairPValue {
    std::uint32_t i;
    std::uint32_t j;
    double pvalue;
};

enum class FdrMethod { BenjaminiHochberg, BenjaminiYekutieli };

/// Indices into `pvalues` rejected at level alpha, ascending. `hypotheses`
/// is the total number of tests m (>= pvalues.size()); the untested ones are
/// treated as p = 1.
std::vector<std::size_t> fdr_reject(std::span<const double> pvalues, std::size_t hypotheses, double alpha,
                                    FdrMethod method = FdrMethod::BenjaminiHochberg);

struct ValidatedLink {
    NodeId a;
    NodeId b;
    std::uint32_t vmotifs;
    double pvalue;
};

struct ProjectionResult {
    UndirectedGraph graph;              // over every top-layer node
    std::vector<ValidatedLink> links;   // validated edges, ordered by (a, b)
    std::size_t hypotheses = 0;         // N_top choose 2
    std::size_t tested = 0;             // pairs with V > 0
    double alpha = 0.0;
    FdrMethod method = FdrMethod::BenjaminiHochberg;
};

struct ProjectionOptions {
    double alpha = 0.01;
    FdrMethod method = FdrMethod::BenjaminiHochberg;
    unsigned threads = 1;
};

/// p-value of every pair with V_ij > 0 under the BiCM: the tail P(V >= V_ij)
/// of the Poisson binomial with probabilities p_ia * p_ja.
std::vector<PairPValue> vmotif_pvalues(const BipartiteGraph& g, const BicmFit& fit,
                                       std::span<const VMotifCount> counts, unsigned threads = 1);

/// Monopartite projection on the top layer keeping FDR-validated pairs.
ProjectionResult validated_projection(const BipartiteGraph& g, const BicmFit& fit,
                                      const ProjectionOptions& options = {});

/// "i,j,vmotifs,pvalue" table.
void write_projection(const ProjectionResult& p, const std::filesystem::path& path, const NodeNamer& name);

}  // namespace infoflow
