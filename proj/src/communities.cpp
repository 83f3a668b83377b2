#include "infoflow/communities.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <numeric>

#include "infoflow/csv.hpp"
#include "infoflow/parallel.hpp"
#include "infoflow/random.hpp"

namespace infoflow {

Partition normalized_partition(std::span<const std::uint32_t> ids) {
    Partition p;
    p.community.resize(ids.size());
    std::map<std::uint32_t, std::uint32_t> renumber;
    for (std::size_t v = 0; v < ids.size(); ++v) {
        const auto [it, inserted] = renumber.emplace(ids[v], p.count);
        if (inserted)
            ++p.count;
        p.community[v] = it->second;
    }
    return p;
}

double modularity_ucm(const UndirectedGraph& g, const Partition& partition, const UcmFit& fit) {
    const std::size_t n = g.node_count();
    if (partition.community.size() != n)
        throw Error("modularity: partition does not cover the graph");
    if (fit.node_count() != n)
        throw Error("modularity: UCM fit does not match the graph");
    if (g.total_weight() == 0)
        return 0.0;

    std::vector<std::vector<std::uint32_t>> groups(partition.count);
    for (std::uint32_t v = 0; v < n; ++v) {
        if (partition.community[v] >= partition.count)
            throw Error("modularity: community id out of range");
        groups[partition.community[v]].push_back(v);
    }
    double sum = 0.0;
    for (const auto& members : groups)
        for (std::size_t x = 0; x < members.size(); ++x)
            for (std::size_t y = x + 1; y < members.size(); ++y) {
                const auto i = members[x], j = members[y];
                sum += 2.0 * (static_cast<double>(g.weight(i, j)) - fit.probability(i, j));
            }
    return sum / (2.0 * static_cast<double>(g.total_weight()));
}

namespace {

// Sparse class histogram of a supernode.
using Histogram = std::vector<std::pair<std::uint32_t, double>>;

struct Level {
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;  // supernode -> (supernode, weight)
    std::vector<Histogram> hist;
};

class LouvainUcm {
public:
    LouvainUcm(const UndirectedGraph& g, const UcmFit& fit) : g_(g) {
        const auto cls = fit.classes();
        classes_ = cls.members.size();
        prob_.assign(classes_ * classes_, 0.0);
        for (std::size_t a = 0; a < classes_; ++a)
            for (std::size_t b = 0; b < classes_; ++b)
                prob_[a * classes_ + b] = link_probability(cls.representative[a], cls.representative[b]);
        class_of_ = cls.of;
    }

    /// Multi-level pass. With `start`, the first level begins from that
    /// partition instead of singletons.
    Partition run(Rng& rng, const Partition* start = nullptr) {
        const std::size_t n = g_.node_count();
        Level level;
        level.adj.resize(n);
        level.hist.resize(n);
        for (std::size_t v = 0; v < n; ++v) {
            for (const auto& a : g_.neighbors(v))
                level.adj[v].push_back({a.target, static_cast<double>(a.weight)});
            level.hist[v] = {{class_of_[v], 1.0}};
        }
        std::vector<std::uint32_t> membership(n);
        std::iota(membership.begin(), membership.end(), 0u);
        const double m = static_cast<double>(g_.total_weight());
        if (m == 0.0)
            return normalized_partition(membership);
        for (int depth = 0;; ++depth) {
            std::vector<std::uint32_t> comm;
            if (depth == 0 && start)
                comm = start->community;
            // a given start partition is always aggregated at least once
            const bool moved = local_moves(level, m, rng, comm) || (depth == 0 && start);
            if (!moved && depth > 0)
                break;
            // compact ids and aggregate
            const auto norm = normalized_partition(comm);
            for (auto& c : membership)
                c = norm.community[c];
            if (!moved)
                break;
            level = aggregate(level, norm);
        }
        return normalized_partition(membership);
    }

private:
    // Row of the class-probability matrix weighted by a histogram:
    // out[c'] = sum_c hist[c] * P[c][c'].
    void weighted_row(const Histogram& hist, std::vector<double>& out) const {
        out.assign(classes_, 0.0);
        for (const auto& [c, k] : hist)
            for (std::size_t b = 0; b < classes_; ++b)
                out[b] += k * prob_[c * classes_ + b];
    }

    static double dot(const Histogram& hist, const std::vector<double>& dense, std::size_t offset) {
        double s = 0.0;
        for (const auto& [c, k] : hist)
            s += k * dense[offset + c];
        return s;
    }

    bool local_moves(const Level& level, double m, Rng& rng, std::vector<std::uint32_t>& comm) const {
        const std::size_t n = level.adj.size();
        if (comm.size() != n) {
            comm.resize(n);
            std::iota(comm.begin(), comm.end(), 0u);
        }
        // expected[c * classes + k]: sum over members j of community c of P(class k, class j)
        std::vector<double> expected(n * classes_, 0.0);
        std::vector<std::vector<double>> rows(n);
        std::vector<std::uint32_t> size(n, 0);
        for (std::size_t s = 0; s < n; ++s) {
            weighted_row(level.hist[s], rows[s]);
            auto* row = expected.data() + static_cast<std::ptrdiff_t>(comm[s] * classes_);
            for (std::size_t b = 0; b < classes_; ++b)
                row[b] += rows[s][b];
            ++size[comm[s]];
        }
        std::vector<std::uint32_t> free_ids;
        for (std::uint32_t c = static_cast<std::uint32_t>(n); c-- > 0;)
            if (size[c] == 0)
                free_ids.push_back(c);
        std::vector<double> link(n, 0.0);
        std::vector<std::uint32_t> touched;
        std::vector<std::uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0u);

        const auto shift = [&](std::uint32_t s, std::uint32_t c, double sign) {
            auto* row = expected.data() + static_cast<std::ptrdiff_t>(c * classes_);
            for (std::size_t b = 0; b < classes_; ++b)
                row[b] += sign * rows[s][b];
        };

        bool any = false;
        for (bool improved = true; improved;) {
            improved = false;
            portable_shuffle(order, rng);
            for (auto s : order) {
                const auto home = comm[s];
                shift(s, home, -1.0);
                if (--size[home] == 0)
                    free_ids.push_back(home);

                touched.clear();
                for (const auto& [t, w] : level.adj[s]) {
                    if (t == s)
                        continue;
                    if (link[comm[t]] == 0.0)
                        touched.push_back(comm[t]);
                    link[comm[t]] += w;
                }
                const auto gain = [&](std::uint32_t c) {
                    return link[c] - dot(level.hist[s], expected, c * classes_);
                };
                // An empty home means "stay" is already the isolated option.
                const double stay = gain(home);
                double best_gain = stay;
                std::uint32_t best = home;
                std::sort(touched.begin(), touched.end());
                for (auto c : touched) {
                    if (c == home)
                        continue;
                    const double gc = gain(c);
                    if (gc > best_gain) {
                        best_gain = gc;
                        best = c;
                    }
                }
                if (size[home] > 0 && 0.0 > best_gain) {
                    best_gain = 0.0;
                    best = kUnassigned;
                }
                for (auto c : touched)
                    link[c] = 0.0;

                if (best != home && (best_gain - stay) / m > 1e-12) {
                    if (best == kUnassigned) {
                        // lazy stack: skip ids that were refilled since
                        while (size[free_ids.back()] != 0)
                            free_ids.pop_back();
                        best = free_ids.back();
                    }
                    improved = any = true;
                } else {
                    best = home;
                }
                ++size[best];
                comm[s] = best;
                shift(s, best, 1.0);
            }
        }
        return any;
    }

    Level aggregate(const Level& level, const Partition& p) const {
        Level next;
        next.adj.resize(p.count);
        next.hist.resize(p.count);
        std::vector<std::map<std::uint32_t, double>> adj(p.count);
        std::vector<std::map<std::uint32_t, double>> hist(p.count);
        for (std::size_t s = 0; s < level.adj.size(); ++s) {
            const auto c = p.community[s];
            for (const auto& [t, w] : level.adj[s])
                adj[c][p.community[t]] += w;
            for (const auto& [k, x] : level.hist[s])
                hist[c][k] += x;
        }
        for (std::uint32_t c = 0; c < p.count; ++c) {
            next.adj[c].assign(adj[c].begin(), adj[c].end());
            next.hist[c].assign(hist[c].begin(), hist[c].end());
        }
        return next;
    }

    const UndirectedGraph& g_;
    std::size_t classes_ = 0;
    std::vector<double> prob_;
    std::vector<std::uint32_t> class_of_;
};

}  // namespace

Partition louvain_ucm(const UndirectedGraph& g, const UcmFit& fit, std::uint64_t seed) {
    if (fit.node_count() != g.node_count())
        throw Error("louvain: UCM fit does not match the graph");
    if (g.node_count() == 0)
        return {};
    LouvainUcm louvain(g, fit);
    Rng rng(seed);
    auto best = louvain.run(rng);
    // Restarting from the result lets nodes leave communities that earlier
    // merges locked them into; stop when a round gains nothing.
    double q = modularity_ucm(g, best, fit);
    for (int round = 0; round < 10; ++round) {
        auto next = louvain.run(rng, &best);
        const double qn = modularity_ucm(g, next, fit);
        if (!(qn > q + 1e-12))
            break;
        best = std::move(next);
        q = qn;
    }
    Partition single{std::vector<std::uint32_t>(g.node_count(), 0), 1};
    // Ties go to the coarser answer: a clique the UCM saturates has Q = 0
    // for every split and should stay whole.
    if (modularity_ucm(g, single, fit) >= modularity_ucm(g, best, fit) - 1e-12)
        return single;
    return best;
}

// ---------------------------------------------------------------------------

std::size_t LabelAssignment::unassigned() const {
    return static_cast<std::size_t>(std::count(label.begin(), label.end(), kUnassigned));
}

namespace {

struct Neighbor {
    std::uint32_t node;
    std::uint64_t weight;
};

// Undirected view: arcs in both directions merged per neighbour.
std::vector<std::vector<Neighbor>> undirected_view(const DirectedGraph& g, bool weighted) {
    std::vector<std::vector<Neighbor>> adj(g.node_count());
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        auto out = g.out_arcs(v);
        auto in = g.in_arcs(v);
        std::size_t a = 0, b = 0;
        while (a < out.size() || b < in.size()) {
            std::uint32_t t;
            std::uint64_t w = 0;
            if (b == in.size() || (a < out.size() && out[a].target < in[b].target)) {
                t = out[a].target;
                w = out[a++].weight;
            } else if (a == out.size() || in[b].target < out[a].target) {
                t = in[b].target;
                w = in[b++].weight;
            } else {
                t = out[a].target;
                w = out[a++].weight + in[b++].weight;
            }
            adj[v].push_back({t, weighted ? w : 1});
        }
    }
    return adj;
}

}  // namespace

LabelAssignment seeded_label_propagation(const DirectedGraph& g, const std::map<NodeId, Label>& seeds,
                                         const LpaOptions& options) {
    if (seeds.empty())
        throw Error("label propagation: empty seed set");
    if (options.runs == 0)
        throw Error("label propagation: runs must be positive");
    const std::size_t n = g.node_count();

    // dense label indices
    std::vector<Label> labels;
    for (const auto& [node, label] : seeds)
        labels.push_back(label);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    const std::size_t label_count = labels.size();
    constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

    std::vector<std::uint32_t> seed_label(n, kNone);
    for (const auto& [node, label] : seeds) {
        const auto local = g.local_index(node);
        if (!local)
            throw Error("label propagation: seed " + std::to_string(node) + " not in graph");
        seed_label[*local] = static_cast<std::uint32_t>(std::lower_bound(labels.begin(), labels.end(), label) -
                                                        labels.begin());
    }
    std::vector<std::uint32_t> free_nodes;
    for (std::uint32_t v = 0; v < n; ++v)
        if (seed_label[v] == kNone)
            free_nodes.push_back(v);

    const auto adj = undirected_view(g, options.weighted);
    std::vector<std::uint32_t> tally(n * label_count, 0);
    std::mutex tally_mutex;

    parallel_for(options.runs, options.threads, [&](std::size_t run) {
        Rng rng(substream_seed(options.seed, "lpa", run));
        std::vector<std::uint32_t> current = seed_label;
        std::vector<std::vector<std::uint32_t>> dropped(n);  // per node, indices into adj[v]
        std::vector<std::uint64_t> votes(label_count, 0);
        std::vector<std::uint32_t> voted;
        std::vector<std::uint32_t> order = free_nodes;

        const auto vote = [&](std::uint32_t v) -> std::uint32_t {
            for (;;) {
                voted.clear();
                const auto& nb = adj[v];
                const auto& gone = dropped[v];
                for (std::uint32_t k = 0; k < nb.size(); ++k) {
                    const auto l = current[nb[k].node];
                    if (l == kNone || std::find(gone.begin(), gone.end(), k) != gone.end())
                        continue;
                    if (votes[l] == 0)
                        voted.push_back(l);
                    votes[l] += nb[k].weight;
                }
                std::uint64_t top = 0;
                std::uint32_t winner = kNone;
                std::size_t ties = 0;
                for (auto l : voted) {
                    if (votes[l] > top) {
                        top = votes[l];
                        winner = l;
                        ties = 1;
                    } else if (votes[l] == top) {
                        ++ties;
                    }
                }
                for (auto l : voted)
                    votes[l] = 0;
                if (ties <= 1)
                    return winner == kNone ? current[v] : winner;
                // Tie: drop one remaining incident edge at random and vote again.
                const std::size_t remaining = nb.size() - gone.size();
                auto pick = uniform_index(rng, remaining);
                for (std::uint32_t k = 0; k < nb.size(); ++k) {
                    if (std::find(gone.begin(), gone.end(), k) != gone.end())
                        continue;
                    if (pick-- == 0) {
                        dropped[v].push_back(k);
                        break;
                    }
                }
            }
        };

        for (std::size_t sweep = 0; sweep < options.max_sweeps; ++sweep) {
            portable_shuffle(order, rng);
            bool changed = false;
            for (auto v : order) {
                const auto next = vote(v);
                if (next != current[v]) {
                    current[v] = next;
                    changed = true;
                }
            }
            if (!changed)
                break;
        }
        std::lock_guard lock(tally_mutex);
        for (std::size_t v = 0; v < n; ++v)
            if (current[v] != kNone)
                ++tally[v * label_count + current[v]];
    });

    LabelAssignment out;
    out.nodes.assign(g.nodes().begin(), g.nodes().end());
    out.label.assign(n, kUnassigned);
    out.frequency.assign(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
        if (seed_label[v] != kNone) {
            out.label[v] = labels[seed_label[v]];
            out.frequency[v] = 1.0;
            continue;
        }
        std::uint32_t best = 0;
        std::size_t best_l = kNone;
        for (std::size_t l = 0; l < label_count; ++l)
            if (tally[v * label_count + l] > best) {
                best = tally[v * label_count + l];
                best_l = l;
            }
        if (best > 0) {
            out.label[v] = labels[best_l];
            out.frequency[v] = static_cast<double>(best) / static_cast<double>(options.runs);
        }
    }
    return out;
}

std::uint64_t CommunitySplit::cross_edges() const {
    std::uint64_t e = 0;
    for (const auto& [key, c] : cross)
        e += c.edges;
    return e;
}

CommunitySplit extract_communities(const DirectedGraph& g, const LabelAssignment& labels) {
    if (labels.nodes.size() != g.node_count())
        throw Error("extract_communities: label assignment does not match the graph");
    CommunitySplit split;
    std::map<Label, std::vector<NodeId>> members;
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        if (labels.label[v] == kUnassigned)
            ++split.unassigned_nodes;
        else
            members[labels.label[v]].push_back(g.node_id(v));
    }
    for (std::size_t u = 0; u < g.node_count(); ++u)
        for (const auto& a : g.out_arcs(u)) {
            const auto lu = labels.label[u], lv = labels.label[a.target];
            if (lu == kUnassigned || lv == kUnassigned) {
                ++split.touching_unassigned.edges;
                split.touching_unassigned.weight += a.weight;
            } else if (lu != lv) {
                auto& c = split.cross[{lu, lv}];
                ++c.edges;
                c.weight += a.weight;
            }
        }
    for (auto& [label, nodes] : members)
        split.communities.push_back({label, induced_subgraph(g, nodes)});
    return split;
}

void write_labels(const LabelAssignment& labels, const std::filesystem::path& path, const NodeNamer& name) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path.string());
    out << "node,label,frequency\n";
    for (std::size_t v = 0; v < labels.nodes.size(); ++v) {
        out << csv_escape(name(labels.nodes[v])) << ',';
        if (labels.label[v] != kUnassigned)
            out << labels.label[v];
        out << ',' << format_double(labels.frequency[v]) << '\n';
    }
    if (!out)
        throw Error("write failed: " + path.string());
}

}  // namespace infoflow
