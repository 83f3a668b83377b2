#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string_view>
#include <span>
#include <string>
#include <vector>

#include "infoflow/digraph.hpp"

namespace infoflow {

/// Lagrange multiplier of one node role (a row or column of the
/// probability matrix).
///
/// Nodes whose degree is zero or maximal are removed before solving; their
/// probabilities are fixed to 0 or 1 against every partner still present at
/// that point. `peel_rank` records that order (-1 for solved roles), and
/// `theta` is +inf / -inf for them.
struct RoleMultiplier {
    double theta = 0.0;
    std::int32_t peel_rank = -1;
    bool saturated = false;

    bool peeled() const noexcept { return peel_rank >= 0; }
};

/// p = e^{-a-b} / (1 + e^{-a-b}) for two solved roles; otherwise the role
/// peeled first decides (1 if it was saturated, 0 if it was empty).
double link_probability(const RoleMultiplier& a, const RoleMultiplier& b) noexcept;

struct SolverOptions {
    /// Max absolute difference between expected and target degree.
    double tolerance = 1e-8;
    int max_iterations = 10000;
    /// Fixed-point iterations without a tenfold drop in the residual before the
    /// solver switches to Newton steps.
    int stagnation_window = 50;
};

struct SolverReport {
    double residual = 0.0;
    int iterations = 0;
    int newton_iterations = 0;
    /// Number of distinct unknowns after degree compression and peeling.
    std::size_t unknowns = 0;
};

struct BipartiteDegrees {
    std::vector<std::uint32_t> top;
    std::vector<std::uint32_t> bottom;
};

struct DirectedDegrees {
    std::vector<std::uint32_t> out;
    std::vector<std::uint32_t> in;
};

struct UndirectedDegrees {
    std::vector<std::uint32_t> degree;
};

DirectedDegrees degrees_of(const DirectedGraph& g);
UndirectedDegrees degrees_of(const UndirectedGraph& g);

/// Groups roles that share a link probability with every partner: solved
/// roles in the same degree class, plus one class for roles pinned to zero
/// before any saturation. Each remaining pinned role is its own class.
struct ProbabilityClasses {
    std::vector<std::uint32_t> of;              // role -> class
    std::vector<std::vector<std::uint32_t>> members;
    std::vector<RoleMultiplier> representative;
    /// Class whose members have probability 0 with everyone, or -1.
    std::int64_t null_class = -1;
};

/// Bipartite configuration model: p_{i,a} for top node i, bottom node a.
class BicmFit {
public:
    std::vector<RoleMultiplier> top;     // eta_i
    std::vector<RoleMultiplier> bottom;  // theta_a
    SolverReport report;

    double probability(std::size_t i, std::size_t a) const noexcept {
        return link_probability(top[i], bottom[a]);
    }
    ProbabilityClasses bottom_classes() const;
};

/// Directed configuration model: q_{ij}, i != j.
class DcmFit {
public:
    std::vector<RoleMultiplier> out;  // gamma_i
    std::vector<RoleMultiplier> in;   // delta_j
    SolverReport report;

    std::size_t node_count() const noexcept { return out.size(); }
    double probability(std::size_t i, std::size_t j) const noexcept {
        return i == j ? 0.0 : link_probability(out[i], in[j]);
    }
    ProbabilityClasses in_classes() const;
};

/// Undirected configuration model: p_{ij} = x_i x_j / (1 + x_i x_j), x = e^{-theta}.
class UcmFit {
public:
    std::vector<RoleMultiplier> node;
    SolverReport report;

    std::size_t node_count() const noexcept { return node.size(); }
    double probability(std::size_t i, std::size_t j) const noexcept {
        return i == j ? 0.0 : link_probability(node[i], node[j]);
    }
    ProbabilityClasses classes() const;
};

/// Throws Error on infeasible degrees and ConvergenceError when the
/// tolerance is not met within the iteration budget.
BicmFit fit_bicm(const BipartiteDegrees& degrees, const SolverOptions& options = {});
DcmFit fit_dcm(const DirectedDegrees& degrees, const SolverOptions& options = {});
UcmFit fit_ucm(const UndirectedDegrees& degrees, const SolverOptions& options = {});

/// One DCM draw: every ordered pair i != j independently with q_{ij}.
/// Node ids are 0..n-1 unless `nodes` (ascending, size n) is given.
/// Deterministic in `seed`.
DirectedGraph sample_dcm(const DcmFit& fit, std::uint64_t seed, std::span<const NodeId> nodes = {});

/// Appends "node,multiplier,role" rows; roles[k] belongs to ids[k]. The
/// header is written when `header` is set. Pinned roles print +-inf.
void write_multipliers(std::ostream& out, std::span<const RoleMultiplier> roles,
                       std::span<const NodeId> ids, std::string_view role,
                       const NodeNamer& name, bool header);

}  // namespace infoflow
