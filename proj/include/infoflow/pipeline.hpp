#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "infoflow/bowtie_stats.hpp"
#include "infoflow/communities.hpp"
#include "infoflow/ingest.hpp"
#include "infoflow/projection.hpp"

namespace infoflow {

struct PipelineConfig {
    std::filesystem::path accounts;
    std::filesystem::path retweets;
    std::filesystem::path ratings;  // optional
    std::filesystem::path output_dir = "out";

    double alpha_projection = 0.01;
    double alpha_blocks = 0.01;
    std::size_t lpa_runs = 500;
    std::size_t ensemble_samples = 1000;
    std::uint64_t master_seed = 0;
    /// 0 = hardware concurrency. Never affects results.
    unsigned threads = 1;

    bool strict_ids = false;
    bool lpa_weighted = true;
    /// Louvain communities smaller than this do not seed label propagation.
    std::size_t min_seed_community = 2;
    FdrMethod projection_fdr = FdrMethod::BenjaminiHochberg;
    InformativeRule informative_rule = InformativeRule::Majority;

    /// Throws Error naming the offending field.
    void validate() const;
};

/// A stage failed; `stage()` names it ("ingest", "project", ...).
class PipelineError : public Error {
public:
    PipelineError(std::string stage, const std::string& cause)
        : Error(stage + ": " + cause), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

struct IngestSummary {
    std::size_t accounts = 0;
    std::size_t verified_accounts = 0;
    std::size_t rows = 0;
    std::size_t records = 0;
    std::size_t self_retweets_dropped = 0;
    std::size_t auto_registered = 0;
    std::size_t digraph_edges = 0;
    std::uint64_t digraph_weight = 0;
    std::size_t bipartite_top = 0;
    std::size_t bipartite_bottom = 0;
    std::size_t bipartite_edges = 0;
    std::size_t rated_domains = 0;
};

struct IngestStage {
    AccountTable accounts;
    DirectedGraph digraph;
    BipartiteGraph bipartite;
    UrlAnnotations urls;
    IngestSummary summary;
};

struct ProjectionSummary {
    std::size_t hypotheses = 0;
    std::size_t tested = 0;
    std::size_t validated = 0;
    double alpha = 0.0;
    std::string fdr_method;
    double bicm_residual = 0.0;
    int bicm_iterations = 0;
};

struct ProjectStage {
    BicmFit fit;
    ProjectionResult projection;
    ProjectionSummary summary;
};

struct CommunitySummary {
    std::size_t verified_communities = 0;
    double modularity = 0.0;
    double ucm_residual = 0.0;
    std::size_t seed_communities = 0;
    std::size_t seeds = 0;
    std::size_t lpa_runs = 0;
    std::size_t unassigned_nodes = 0;
    std::uint64_t cross_edges = 0;
};

struct CommunityStage {
    UcmFit ucm;
    Partition verified_partition;  // over projection.graph local indices
    std::map<NodeId, Label> seeds;
    LabelAssignment labels;
    CommunitySplit split;
    CommunitySummary summary;
};

struct BowtieResult {
    Label label = 0;
    DirectedGraph graph;
    BowTiePartition partition;
    BlockTest test;
    PerSector<bool> significant{};
    BowTieClass classification;
};

struct CommunityReport {
    Label label = 0;
    std::size_t nodes = 0;
    std::size_t edges = 0;
    std::uint64_t weight = 0;
    std::size_t verified = 0;
    SectorSizes sizes{};
    BowTieClass classification;
    PerSector<double> pvalue{};
    PerSector<bool> significant{};
    PerSector<double> ensemble_mean{};
    std::size_t ensemble_samples = 0;
    double dcm_residual = 0.0;
    SectorStats stats;

    /// node name and sector, in node order; written as a table, not in the
    /// structured report.
    std::vector<std::pair<std::string, Sector>> members;
};

struct RunReport {
    IngestSummary ingest;
    ProjectionSummary projection;
    CommunitySummary communities;
    std::vector<CommunityReport> community;
    std::size_t total_nodes = 0;
    std::size_t unassigned_nodes = 0;
    double unassigned_share = 0.0;
    PipelineConfig config;
};

IngestStage run_ingest(const PipelineConfig& config);
ProjectStage run_projection(const IngestStage& ingest, const PipelineConfig& config);
CommunityStage run_communities(const IngestStage& ingest, const ProjectStage& project,
                               const PipelineConfig& config);
std::vector<BowtieResult> run_bowtie(const CommunitySplit& split, const PipelineConfig& config);
RunReport assemble_report(const IngestStage& ingest, const ProjectionSummary& projection,
                          const CommunitySummary& communities, const std::vector<BowtieResult>& bowties,
                          const PipelineConfig& config);

/// ingest -> project -> communities -> bowtie -> report, in memory.
/// Stage failures are rethrown as PipelineError.
RunReport run_pipeline(const PipelineConfig& config);

/// Writes report.json plus, per community, community_<label>_sectors.csv
/// and community_<label>_bowtie.dot. Files are staged and moved into place
/// only when every write succeeded.
std::vector<std::filesystem::path> emit_report(const RunReport& report, const std::filesystem::path& directory);

/// The structured report as JSON text (what report.json contains).
std::string report_json(const RunReport& report);
/// DOT diagram of one community's bow-tie.
std::string bowtie_dot(const CommunityReport& community);

// Intermediate artifacts, so stages can be re-run one at a time.
void save_ingest(const IngestStage& stage, const std::filesystem::path& dir);
IngestStage load_ingest(const std::filesystem::path& dir);
void save_projection(const ProjectStage& stage, const IngestStage& ingest, const std::filesystem::path& dir);
ProjectStage load_projection(const IngestStage& ingest, const std::filesystem::path& dir);
void save_communities(const CommunityStage& stage, const IngestStage& ingest, const ProjectStage& project,
                      const std::filesystem::path& dir);
/// Labels and summary only; the split is rebuilt from the digraph.
CommunityStage load_communities(const IngestStage& ingest, const std::filesystem::path& dir);
void save_bowtie(const std::vector<BowtieResult>& results, const IngestStage& ingest,
                 const std::filesystem::path& dir);
std::vector<BowtieResult> load_bowtie(const IngestStage& ingest, const CommunitySplit& split,
                                      const std::filesystem::path& dir);

std::string_view fdr_method_name(FdrMethod m);
std::string_view informative_rule_name(InformativeRule r);

}  // namespace infoflow
