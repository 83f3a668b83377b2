#include "infoflow/projection.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "infoflow/csv.hpp"
#include "infoflow/parallel.hpp"

namespace infoflow {

namespace {

void check_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw Error("probability outside [0,1]: " + format_double(p));
}

}  // namespace

double poisson_binomial_tail(std::span<const double> probs, std::size_t n) {
    for (double p : probs)
        check_probability(p);
    if (n > probs.size())
        throw Error("poisson_binomial_tail: n exceeds the number of trials");
    if (n == 0)
        return 1.0;
    // dist[k] = P(partial sum == k) for k < n; `tail` absorbs mass at >= n
    // so small tails are accumulated directly instead of as 1 - cdf.
    std::vector<double> dist(n, 0.0);
    dist[0] = 1.0;
    double tail = 0.0;
    std::size_t reach = 0;  // highest k with nonzero mass so far
    for (double p : probs) {
        if (p == 0.0)
            continue;
        const double q = 1.0 - p;
        tail += dist[n - 1] * p;
        const std::size_t top = std::min(reach + 1, n - 1);
        for (std::size_t k = top; k > 0; --k)
            dist[k] = dist[k] * q + dist[k - 1] * p;
        dist[0] *= q;
        reach = top;
    }
    return std::min(1.0, tail);
}

std::vector<double> poisson_binomial_pmf(std::span<const double> probs) {
    for (double p : probs)
        check_probability(p);
    std::vector<double> dist(probs.size() + 1, 0.0);
    dist[0] = 1.0;
    for (std::size_t t = 0; t < probs.size(); ++t) {
        const double p = probs[t];
        const double q = 1.0 - p;
        for (std::size_t k = t + 1; k > 0; --k)
            dist[k] = dist[k] * q + dist[k - 1] * p;
        dist[0] *= q;
    }
    return dist;
}

std::vector<VMotifCount> vmotif_counts(const BipartiteGraph& g) {
    const std::size_t n = g.top.size();
    std::vector<VMotifCount> out;
    std::vector<std::uint32_t> common(n, 0);
    std::vector<std::uint32_t> touched;
    for (std::uint32_t i = 0; i < n; ++i) {
        touched.clear();
        for (auto a : g.top_adj[i])
            for (auto j : g.bottom_adj[a])
                if (j > i) {
                    if (common[j]++ == 0)
                        touched.push_back(j);
                }
        std::sort(touched.begin(), touched.end());
        for (auto j : touched) {
            out.push_back({i, j, common[j]});
            common[j] = 0;
        }
    }
    return out;
}

std::vector<std::size_t> fdr_reject(std::span<const double> pvalues, std::size_t hypotheses, double alpha,
                                    FdrMethod method) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error("FDR level must lie in (0,1)");
    if (hypotheses < pvalues.size())
        throw Error("FDR: fewer hypotheses than p-values");
    std::vector<std::size_t> order(pvalues.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pvalues[a] < pvalues[b]; });
    const double m = static_cast<double>(hypotheses);
    double level = alpha / m;
    if (method == FdrMethod::BenjaminiYekutieli) {
        double harmonic = 0.0;
        for (std::size_t k = 1; k <= hypotheses; ++k)
            harmonic += 1.0 / static_cast<double>(k);
        level /= harmonic;
    }
    std::size_t rejected = 0;
    for (std::size_t r = 0; r < order.size(); ++r)
        if (pvalues[order[r]] <= static_cast<double>(r + 1) * level)
            rejected = r + 1;
    std::vector<std::size_t> out(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(rejected));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<PairPValue> vmotif_pvalues(const BipartiteGraph& g, const BicmFit& fit,
                                       std::span<const VMotifCount> counts, unsigned threads) {
    if (fit.top.size() != g.top.size() || fit.bottom.size() != g.bottom.size())
        throw Error("BiCM fit does not match the bipartite graph");
    // Bottom nodes with equal multipliers contribute identical Bernoulli
    // factors; group them once.
    const auto classes = fit.bottom_classes();
    std::vector<PairPValue> out(counts.size());
    parallel_for(counts.size(), threads, [&](std::size_t k) {
        const auto& c = counts[k];
        std::vector<double> probs;
        probs.reserve(g.bottom.size());
        for (std::size_t cls = 0; cls < classes.members.size(); ++cls) {
            if (static_cast<std::int64_t>(cls) == classes.null_class)
                continue;
            const double p = link_probability(fit.top[c.i], classes.representative[cls]) *
                             link_probability(fit.top[c.j], classes.representative[cls]);
            if (p > 0.0)
                probs.insert(probs.end(), classes.members[cls].size(), p);
        }
        out[k] = {c.i, c.j, poisson_binomial_tail(probs, c.count)};
    });
    return out;
}

ProjectionResult validated_projection(const BipartiteGraph& g, const BicmFit& fit,
                                      const ProjectionOptions& options) {
    ProjectionResult result;
    result.alpha = options.alpha;
    result.method = options.method;
    const std::size_t n = g.top.size();
    result.hypotheses = n < 2 ? 0 : n * (n - 1) / 2;

    const auto counts = vmotif_counts(g);
    result.tested = counts.size();
    const auto pvalues = vmotif_pvalues(g, fit, counts, options.threads);

    std::vector<WeightedEdge> edges;
    if (result.hypotheses > 0) {
        std::vector<double> p(pvalues.size());
        for (std::size_t k = 0; k < p.size(); ++k)
            p[k] = pvalues[k].pvalue;
        for (auto k : fdr_reject(p, result.hypotheses, options.alpha, options.method)) {
            const NodeId a = g.top[pvalues[k].i];
            const NodeId b = g.top[pvalues[k].j];
            result.links.push_back({a, b, counts[k].count, pvalues[k].pvalue});
            edges.push_back({a, b, 1});
        }
    }
    result.graph = UndirectedGraph(g.top, edges);
    return result;
}

void write_projection(const ProjectionResult& p, const std::filesystem::path& path, const NodeNamer& name) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path.string());
    out << "i,j,vmotifs,pvalue\n";
    for (const auto& l : p.links)
        out << csv_escape(name(l.a)) << ',' << csv_escape(name(l.b)) << ',' << l.vmotifs << ','
            << format_double(l.pvalue) << '\n';
    if (!out)
        throw Error("write failed: " + path.string());
}

}  // namespace infoflow
