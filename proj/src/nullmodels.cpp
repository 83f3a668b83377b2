#include "infoflow/nullmodels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <Eigen/Dense>

#include "infoflow/csv.hpp"
#include "infoflow/random.hpp"

namespace infoflow {

double link_probability(const RoleMultiplier& a, const RoleMultiplier& b) noexcept {
    if (a.peeled() || b.peeled()) {
        const bool a_first = a.peeled() && (!b.peeled() || a.peel_rank < b.peel_rank);
        return (a_first ? a.saturated : b.saturated) ? 1.0 : 0.0;
    }
    const double s = a.theta + b.theta;
    return 1.0 / (1.0 + std::exp(s));
}

DirectedDegrees degrees_of(const DirectedGraph& g) {
    DirectedDegrees d;
    d.out.resize(g.node_count());
    d.in.resize(g.node_count());
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        d.out[v] = static_cast<std::uint32_t>(g.out_degree(v));
        d.in[v] = static_cast<std::uint32_t>(g.in_degree(v));
    }
    return d;
}

UndirectedDegrees degrees_of(const UndirectedGraph& g) {
    UndirectedDegrees d;
    d.degree.resize(g.node_count());
    for (std::size_t v = 0; v < g.node_count(); ++v)
        d.degree[v] = static_cast<std::uint32_t>(g.degree(v));
    return d;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Peeling of zero-degree and saturated roles.

struct Pinner {
    std::int32_t next_rank = 0;

    void pin(RoleMultiplier& role, bool saturated) {
        role.peel_rank = next_rank++;
        role.saturated = saturated;
        role.theta = saturated ? -kInf : kInf;
    }
};

[[noreturn]] void infeasible(const char* model, const std::string& detail) {
    throw Error(std::string(model) + ": infeasible degree sequence (" + detail + ")");
}

// Rows pair with columns; with `no_diagonal` row i never pairs with column i.
void peel_two_sided(const char* model, std::vector<std::int64_t>& r, std::vector<std::int64_t>& c,
                    bool no_diagonal, std::vector<RoleMultiplier>& rows,
                    std::vector<RoleMultiplier>& cols) {
    Pinner pinner;
    std::size_t active_rows = r.size(), active_cols = c.size();
    const auto row_allowed = [&](std::size_t i) {
        return active_cols - (no_diagonal && !cols[i].peeled() ? 1 : 0);
    };
    const auto col_allowed = [&](std::size_t j) {
        return active_rows - (no_diagonal && !rows[j].peeled() ? 1 : 0);
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < r.size(); ++i)
            if (!rows[i].peeled() && r[i] == 0) {
                pinner.pin(rows[i], false);
                --active_rows;
                changed = true;
            }
        for (std::size_t j = 0; j < c.size(); ++j)
            if (!cols[j].peeled() && c[j] == 0) {
                pinner.pin(cols[j], false);
                --active_cols;
                changed = true;
            }
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (rows[i].peeled())
                continue;
            const auto allowed = static_cast<std::int64_t>(row_allowed(i));
            if (r[i] > allowed)
                infeasible(model, "row " + std::to_string(i) + " degree " + std::to_string(r[i]) +
                                      " exceeds " + std::to_string(allowed));
            if (r[i] != allowed)
                continue;
            for (std::size_t j = 0; j < c.size(); ++j) {
                if (cols[j].peeled() || (no_diagonal && i == j))
                    continue;
                if (--c[j] < 0)
                    infeasible(model, "column " + std::to_string(j));
            }
            r[i] = 0;
            pinner.pin(rows[i], true);
            --active_rows;
            changed = true;
        }
        for (std::size_t j = 0; j < c.size(); ++j) {
            if (cols[j].peeled())
                continue;
            const auto allowed = static_cast<std::int64_t>(col_allowed(j));
            if (c[j] > allowed)
                infeasible(model, "column " + std::to_string(j) + " degree " + std::to_string(c[j]) +
                                      " exceeds " + std::to_string(allowed));
            if (c[j] != allowed)
                continue;
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (rows[i].peeled() || (no_diagonal && i == j))
                    continue;
                if (--r[i] < 0)
                    infeasible(model, "row " + std::to_string(i));
            }
            c[j] = 0;
            pinner.pin(cols[j], true);
            --active_cols;
            changed = true;
        }
    }
}

void peel_one_sided(std::vector<std::int64_t>& k, std::vector<RoleMultiplier>& nodes) {
    Pinner pinner;
    std::size_t active = k.size();
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < k.size(); ++i)
            if (!nodes[i].peeled() && k[i] == 0) {
                pinner.pin(nodes[i], false);
                --active;
                changed = true;
            }
        for (std::size_t i = 0; i < k.size(); ++i) {
            if (nodes[i].peeled())
                continue;
            const auto allowed = static_cast<std::int64_t>(active - 1);
            if (k[i] > allowed)
                infeasible("UCM", "node " + std::to_string(i) + " degree " + std::to_string(k[i]) +
                                      " exceeds " + std::to_string(allowed));
            if (k[i] != allowed)
                continue;
            for (std::size_t j = 0; j < k.size(); ++j) {
                if (j == i || nodes[j].peeled())
                    continue;
                if (--k[j] < 0)
                    infeasible("UCM", "node " + std::to_string(j));
            }
            k[i] = 0;
            pinner.pin(nodes[i], true);
            --active;
            changed = true;
        }
    }
}

// ---------------------------------------------------------------------------
// Reduced system: one unknown per degree class.
//
// Minimises  L(theta) = sum_v C_v theta_v + sum_t w_t log(1 + e^{-theta_u - theta_v})
// whose stationarity conditions are <degree> = target for every class.

struct Term {
    std::uint32_t u;
    std::uint32_t v;  // u == v: pairs inside one class
    double weight;
};

struct ReducedSystem {
    std::vector<double> target;        // C_v: summed target degree of the class
    std::vector<double> multiplicity;  // nodes in the class
    std::vector<Term> terms;
    std::vector<double> theta;
};

double softplus(double x) {
    return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid_neg(double s) {
    return 1.0 / (1.0 + std::exp(s));
}

struct Evaluation {
    std::vector<double> expected;
    double residual = 0.0;
};

Evaluation evaluate(const ReducedSystem& sys, const std::vector<double>& theta) {
    Evaluation ev;
    ev.expected.assign(theta.size(), 0.0);
    for (const auto& t : sys.terms) {
        const double p = sigmoid_neg(theta[t.u] + theta[t.v]);
        if (t.u == t.v) {
            ev.expected[t.u] += 2.0 * t.weight * p;
        } else {
            ev.expected[t.u] += t.weight * p;
            ev.expected[t.v] += t.weight * p;
        }
    }
    for (std::size_t v = 0; v < theta.size(); ++v)
        ev.residual = std::max(ev.residual, std::abs(sys.target[v] - ev.expected[v]) / sys.multiplicity[v]);
    return ev;
}

double objective(const ReducedSystem& sys, const std::vector<double>& theta) {
    double value = 0.0;
    for (std::size_t v = 0; v < theta.size(); ++v)
        value += sys.target[v] * theta[v];
    for (const auto& t : sys.terms)
        value += t.weight * softplus(-(theta[t.u] + theta[t.v]));
    return value;
}

// One Newton step with backtracking; returns false if no decrease was found.
// Close to the optimum the objective is flat to rounding, so a step that
// lowers the residual is accepted as well.
bool newton_step(const ReducedSystem& sys, std::vector<double>& theta, Evaluation& ev) {
    const auto d = static_cast<Eigen::Index>(theta.size());
    Eigen::MatrixXd hessian = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd gradient(d);
    for (Eigen::Index v = 0; v < d; ++v)
        gradient[v] = sys.target[v] - ev.expected[v];
    for (const auto& t : sys.terms) {
        const double p = sigmoid_neg(theta[t.u] + theta[t.v]);
        const double h = t.weight * p * (1.0 - p);
        if (t.u == t.v) {
            hessian(t.u, t.u) += 4.0 * h;
        } else {
            hessian(t.u, t.u) += h;
            hessian(t.v, t.v) += h;
            hessian(t.u, t.v) += h;
            hessian(t.v, t.u) += h;
        }
    }
    // The bipartite and directed systems have a flat direction (shift rows
    // up, columns down); a small ridge keeps the factorisation regular.
    double ridge = 1e-10 * (1.0 + hessian.diagonal().cwiseAbs().maxCoeff());
    Eigen::VectorXd step;
    for (int attempt = 0; attempt < 8; ++attempt) {
        Eigen::MatrixXd damped = hessian;
        damped.diagonal().array() += ridge;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
        if (ldlt.info() == Eigen::Success) {
            step = -ldlt.solve(gradient);
            if (step.allFinite())
                break;
        }
        ridge *= 100.0;
        step.resize(0);
    }
    if (step.size() == 0)
        return false;

    const double f0 = objective(sys, theta);
    const double slope = gradient.dot(step);
    std::vector<double> trial(theta.size());
    double t = 1.0;
    for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
        for (std::size_t v = 0; v < theta.size(); ++v)
            trial[v] = theta[v] + t * step[static_cast<Eigen::Index>(v)];
        const double f1 = objective(sys, trial);
        if (!std::isfinite(f1))
            continue;
        auto trial_ev = evaluate(sys, trial);
        if (f1 <= f0 + 1e-4 * t * slope || trial_ev.residual < ev.residual) {
            theta = trial;
            ev = std::move(trial_ev);
            return true;
        }
    }
    return false;
}

SolverReport solve(ReducedSystem& sys, const SolverOptions& options, const char* model) {
    SolverReport report;
    report.unknowns = sys.theta.size();
    if (sys.theta.empty())
        return report;

    // Newton takes over once the fixed point slows down; beyond this size a
    // dense Hessian is too expensive and we keep iterating the fixed point.
    constexpr std::size_t kMaxNewtonUnknowns = 4000;
    const bool newton_allowed = sys.theta.size() <= kMaxNewtonUnknowns;

    auto& theta = sys.theta;
    auto ev = evaluate(sys, theta);
    double damping = 1.0;
    double window_start = ev.residual;
    bool newton = false;
    int newton_failures = 0;
    for (int it = 0; it < options.max_iterations; ++it) {
        if (ev.residual <= options.tolerance) {
            report.residual = ev.residual;
            return report;
        }
        ++report.iterations;
        if (newton) {
            ++report.newton_iterations;
            if (!newton_step(sys, theta, ev)) {
                // numerical floor; give the fixed point a window, then retry
                newton = false;
                ++newton_failures;
                window_start = ev.residual;
            }
            continue;
        }
        const auto previous = theta;
        const double previous_residual = ev.residual;
        for (std::size_t v = 0; v < theta.size(); ++v)
            theta[v] -= damping * std::log(sys.target[v] / ev.expected[v]);
        auto trial = evaluate(sys, theta);
        if (!(trial.residual < previous_residual) || !std::isfinite(trial.residual)) {
            damping = std::max(0.05, damping * 0.5);
            if (!std::isfinite(trial.residual)) {
                theta = previous;
                trial = evaluate(sys, theta);
            }
        }
        ev = std::move(trial);
        if ((it + 1) % options.stagnation_window == 0) {
            // less than a tenfold gain over the window counts as stalling
            if (newton_allowed && newton_failures < 20 && ev.residual > 0.1 * window_start)
                newton = true;
            window_start = ev.residual;
        }
    }
    if (ev.residual <= options.tolerance) {
        report.residual = ev.residual;
        return report;
    }
    throw ConvergenceError(std::string(model) + ": no convergence after " +
                               std::to_string(options.max_iterations) + " iterations",
                           ev.residual);
}

// Assigns each free role to a class keyed by `key`; returns class count and
// fills per-class multiplicity and target sum.
template <class Key>
struct Classes {
    std::map<Key, std::uint32_t> index;
    std::vector<std::uint32_t> of;  // role -> class (or max when pinned)
    std::vector<double> count;
    std::vector<double> target_sum;
};

constexpr std::uint32_t kNoClass = std::numeric_limits<std::uint32_t>::max();

double initial_theta(double degree, double scale) {
    return -std::log(std::max(degree, 1e-3) / scale);
}

}  // namespace

// ---------------------------------------------------------------------------

BicmFit fit_bicm(const BipartiteDegrees& degrees, const SolverOptions& options) {
    std::vector<std::int64_t> k(degrees.top.begin(), degrees.top.end());
    std::vector<std::int64_t> h(degrees.bottom.begin(), degrees.bottom.end());
    const auto sum_k = std::accumulate(k.begin(), k.end(), std::int64_t{0});
    const auto sum_h = std::accumulate(h.begin(), h.end(), std::int64_t{0});
    if (sum_k != sum_h)
        infeasible("BiCM", "degree sums differ: " + std::to_string(sum_k) + " vs " + std::to_string(sum_h));

    BicmFit fit;
    fit.top.resize(k.size());
    fit.bottom.resize(h.size());
    peel_two_sided("BiCM", k, h, false, fit.top, fit.bottom);

    Classes<std::int64_t> rows, cols;
    const auto classify = [](auto& cls, const std::vector<std::int64_t>& deg,
                             const std::vector<RoleMultiplier>& roles) {
        cls.of.assign(deg.size(), kNoClass);
        for (std::size_t i = 0; i < deg.size(); ++i)
            if (!roles[i].peeled())
                cls.index.emplace(deg[i], 0);
        std::uint32_t next = 0;
        for (auto& [key, idx] : cls.index)
            idx = next++;
        cls.count.assign(next, 0.0);
        cls.target_sum.assign(next, 0.0);
        for (std::size_t i = 0; i < deg.size(); ++i)
            if (!roles[i].peeled()) {
                const auto c = cls.index[deg[i]];
                cls.of[i] = c;
                cls.count[c] += 1;
                cls.target_sum[c] += static_cast<double>(deg[i]);
            }
    };
    classify(rows, k, fit.top);
    classify(cols, h, fit.bottom);

    ReducedSystem sys;
    const auto nr = static_cast<std::uint32_t>(rows.count.size());
    const auto nc = static_cast<std::uint32_t>(cols.count.size());
    double edges = 0.0;
    for (std::uint32_t a = 0; a < nr; ++a) {
        sys.target.push_back(rows.target_sum[a]);
        sys.multiplicity.push_back(rows.count[a]);
        edges += rows.target_sum[a];
    }
    for (std::uint32_t b = 0; b < nc; ++b) {
        sys.target.push_back(cols.target_sum[b]);
        sys.multiplicity.push_back(cols.count[b]);
    }
    for (std::uint32_t a = 0; a < nr; ++a)
        for (std::uint32_t b = 0; b < nc; ++b)
            sys.terms.push_back({a, nr + b, rows.count[a] * cols.count[b]});
    const double scale = std::sqrt(std::max(edges, 1.0));
    for (std::size_t v = 0; v < sys.target.size(); ++v)
        sys.theta.push_back(initial_theta(sys.target[v] / sys.multiplicity[v], scale));

    fit.report = solve(sys, options, "BiCM");
    for (std::size_t i = 0; i < k.size(); ++i)
        if (rows.of[i] != kNoClass)
            fit.top[i].theta = sys.theta[rows.of[i]];
    for (std::size_t a = 0; a < h.size(); ++a)
        if (cols.of[a] != kNoClass)
            fit.bottom[a].theta = sys.theta[nr + cols.of[a]];
    return fit;
}

DcmFit fit_dcm(const DirectedDegrees& degrees, const SolverOptions& options) {
    if (degrees.out.size() != degrees.in.size())
        throw Error("DCM: out- and in-degree sequences differ in length");
    const std::size_t n = degrees.out.size();
    std::vector<std::int64_t> kout(degrees.out.begin(), degrees.out.end());
    std::vector<std::int64_t> kin(degrees.in.begin(), degrees.in.end());
    const auto sum_out = std::accumulate(kout.begin(), kout.end(), std::int64_t{0});
    const auto sum_in = std::accumulate(kin.begin(), kin.end(), std::int64_t{0});
    if (sum_out != sum_in)
        infeasible("DCM", "degree sums differ: " + std::to_string(sum_out) + " vs " + std::to_string(sum_in));

    DcmFit fit;
    fit.out.resize(n);
    fit.in.resize(n);
    peel_two_sided("DCM", kout, kin, true, fit.out, fit.in);

    // A class is a (residual out, residual in) pair; -1 marks a pinned role.
    using Key = std::pair<std::int64_t, std::int64_t>;
    std::map<Key, std::uint32_t> index;
    std::vector<std::uint32_t> node_class(n, kNoClass);
    for (std::size_t i = 0; i < n; ++i) {
        if (fit.out[i].peeled() && fit.in[i].peeled())
            continue;
        index.emplace(Key{fit.out[i].peeled() ? -1 : kout[i], fit.in[i].peeled() ? -1 : kin[i]}, 0);
    }
    std::vector<Key> keys;
    for (auto& [key, idx] : index) {
        idx = static_cast<std::uint32_t>(keys.size());
        keys.push_back(key);
    }
    std::vector<double> count(keys.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (fit.out[i].peeled() && fit.in[i].peeled())
            continue;
        node_class[i] = index[Key{fit.out[i].peeled() ? -1 : kout[i], fit.in[i].peeled() ? -1 : kin[i]}];
        count[node_class[i]] += 1;
    }

    ReducedSystem sys;
    std::vector<std::int64_t> out_var(keys.size(), -1), in_var(keys.size(), -1);
    double edges = 0.0;
    for (std::size_t c = 0; c < keys.size(); ++c) {
        if (keys[c].first >= 0) {
            out_var[c] = static_cast<std::int64_t>(sys.target.size());
            sys.target.push_back(count[c] * static_cast<double>(keys[c].first));
            sys.multiplicity.push_back(count[c]);
            edges += sys.target.back();
        }
        if (keys[c].second >= 0) {
            in_var[c] = static_cast<std::int64_t>(sys.target.size());
            sys.target.push_back(count[c] * static_cast<double>(keys[c].second));
            sys.multiplicity.push_back(count[c]);
        }
    }
    for (std::size_t a = 0; a < keys.size(); ++a) {
        if (out_var[a] < 0)
            continue;
        for (std::size_t b = 0; b < keys.size(); ++b) {
            if (in_var[b] < 0)
                continue;
            const double pairs = count[a] * count[b] - (a == b ? count[a] : 0.0);
            if (pairs > 0)
                sys.terms.push_back({static_cast<std::uint32_t>(out_var[a]),
                                     static_cast<std::uint32_t>(in_var[b]), pairs});
        }
    }
    const double scale = std::sqrt(std::max(edges, 1.0));
    for (std::size_t v = 0; v < sys.target.size(); ++v)
        sys.theta.push_back(initial_theta(sys.target[v] / sys.multiplicity[v], scale));

    fit.report = solve(sys, options, "DCM");
    for (std::size_t i = 0; i < n; ++i) {
        if (node_class[i] == kNoClass)
            continue;
        if (out_var[node_class[i]] >= 0)
            fit.out[i].theta = sys.theta[static_cast<std::size_t>(out_var[node_class[i]])];
        if (in_var[node_class[i]] >= 0)
            fit.in[i].theta = sys.theta[static_cast<std::size_t>(in_var[node_class[i]])];
    }
    return fit;
}

UcmFit fit_ucm(const UndirectedDegrees& degrees, const SolverOptions& options) {
    std::vector<std::int64_t> k(degrees.degree.begin(), degrees.degree.end());
    const auto sum = std::accumulate(k.begin(), k.end(), std::int64_t{0});
    if (sum % 2 != 0)
        infeasible("UCM", "odd degree sum " + std::to_string(sum));

    UcmFit fit;
    fit.node.resize(k.size());
    peel_one_sided(k, fit.node);

    std::map<std::int64_t, std::uint32_t> index;
    for (std::size_t i = 0; i < k.size(); ++i)
        if (!fit.node[i].peeled())
            index.emplace(k[i], 0);
    std::uint32_t next = 0;
    for (auto& [key, idx] : index)
        idx = next++;

    ReducedSystem sys;
    sys.target.assign(next, 0.0);
    sys.multiplicity.assign(next, 0.0);
    std::vector<std::uint32_t> of(k.size(), kNoClass);
    for (std::size_t i = 0; i < k.size(); ++i)
        if (!fit.node[i].peeled()) {
            of[i] = index[k[i]];
            sys.multiplicity[of[i]] += 1;
            sys.target[of[i]] += static_cast<double>(k[i]);
        }
    double stubs = 0.0;
    for (std::uint32_t a = 0; a < next; ++a) {
        stubs += sys.target[a];
        for (std::uint32_t b = a; b < next; ++b) {
            const double pairs = a == b ? sys.multiplicity[a] * (sys.multiplicity[a] - 1) / 2
                                        : sys.multiplicity[a] * sys.multiplicity[b];
            if (pairs > 0)
                sys.terms.push_back({a, b, pairs});
        }
    }
    const double scale = std::sqrt(std::max(stubs, 1.0));
    for (std::uint32_t v = 0; v < next; ++v)
        sys.theta.push_back(initial_theta(sys.target[v] / sys.multiplicity[v], scale));

    fit.report = solve(sys, options, "UCM");
    for (std::size_t i = 0; i < k.size(); ++i)
        if (of[i] != kNoClass)
            fit.node[i].theta = sys.theta[of[i]];
    return fit;
}

// ---------------------------------------------------------------------------

namespace {

std::int32_t first_saturation(std::initializer_list<std::span<const RoleMultiplier>> sides) {
    std::int32_t first = std::numeric_limits<std::int32_t>::max();
    for (auto side : sides)
        for (const auto& r : side)
            if (r.peeled() && r.saturated)
                first = std::min(first, r.peel_rank);
    return first;
}

ProbabilityClasses build_classes(std::span<const RoleMultiplier> roles, std::int32_t first_saturated) {
    ProbabilityClasses cls;
    cls.of.resize(roles.size());
    std::map<std::uint64_t, std::uint32_t> by_theta;
    for (std::size_t i = 0; i < roles.size(); ++i) {
        const auto& r = roles[i];
        std::uint32_t c;
        if (r.peeled() && !r.saturated && r.peel_rank < first_saturated) {
            if (cls.null_class < 0) {
                cls.null_class = static_cast<std::int64_t>(cls.members.size());
                cls.members.emplace_back();
                cls.representative.push_back(r);
            }
            c = static_cast<std::uint32_t>(cls.null_class);
        } else if (r.peeled()) {
            c = static_cast<std::uint32_t>(cls.members.size());
            cls.members.emplace_back();
            cls.representative.push_back(r);
        } else {
            const auto key = std::bit_cast<std::uint64_t>(r.theta);
            const auto [it, inserted] = by_theta.emplace(key, static_cast<std::uint32_t>(cls.members.size()));
            if (inserted) {
                cls.members.emplace_back();
                cls.representative.push_back(r);
            }
            c = it->second;
        }
        cls.of[i] = c;
        cls.members[c].push_back(static_cast<std::uint32_t>(i));
    }
    return cls;
}

}  // namespace

ProbabilityClasses BicmFit::bottom_classes() const {
    return build_classes(bottom, first_saturation({top, bottom}));
}

ProbabilityClasses DcmFit::in_classes() const {
    return build_classes(in, first_saturation({out, in}));
}

ProbabilityClasses UcmFit::classes() const {
    return build_classes(node, first_saturation({node}));
}

DirectedGraph sample_dcm(const DcmFit& fit, std::uint64_t seed, std::span<const NodeId> nodes) {
    const std::size_t n = fit.node_count();
    std::vector<NodeId> ids;
    if (nodes.empty()) {
        ids.resize(n);
        std::iota(ids.begin(), ids.end(), NodeId{0});
    } else {
        if (nodes.size() != n)
            throw Error("sample_dcm: node list size does not match the fit");
        ids.assign(nodes.begin(), nodes.end());
    }
    const auto classes = fit.in_classes();
    Rng rng(seed);
    std::vector<WeightedEdge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < classes.members.size(); ++c) {
            if (static_cast<std::int64_t>(c) == classes.null_class)
                continue;
            const auto& members = classes.members[c];
            const double q = link_probability(fit.out[i], classes.representative[c]);
            if (q <= 0.0)
                continue;
            if (q >= 1.0) {
                for (auto j : members)
                    if (j != i)
                        edges.push_back({ids[i], ids[j], 1});
                continue;
            }
            // Geometric skipping: the gap to the next success is
            // floor(log(U) / log(1 - q)).
            const double log_miss = std::log1p(-q);
            std::size_t pos = 0;
            for (;;) {
                const double u = 1.0 - uniform01(rng);  // (0, 1]
                const double skip = std::floor(std::log(u) / log_miss);
                if (skip >= static_cast<double>(members.size() - pos))
                    break;
                pos += static_cast<std::size_t>(skip);
                if (members[pos] != i)
                    edges.push_back({ids[i], ids[members[pos]], 1});
                if (++pos >= members.size())
                    break;
            }
        }
    }
    return DirectedGraph(std::move(ids), edges);
}

void write_multipliers(std::ostream& out, std::span<const RoleMultiplier> roles, std::span<const NodeId> ids,
                       std::string_view role, const NodeNamer& name, bool header) {
    if (header)
        out << "node,multiplier,role\n";
    for (std::size_t k = 0; k < roles.size(); ++k)
        out << csv_escape(name(ids[k])) << ',' << format_double(roles[k].theta) << ',' << role << '\n';
}

}  // namespace infoflow
