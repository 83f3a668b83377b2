#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "infoflow/csv.hpp"
#include "infoflow/pipeline.hpp"

namespace infoflow {

// Insertion-ordered so sectors appear in their usual order.
using json = nlohmann::ordered_json;

void to_json(nlohmann::json& j, const IngestSummary& s);
void to_json(nlohmann::json& j, const ProjectionSummary& s);
void to_json(nlohmann::json& j, const CommunitySummary& s);

namespace {

json config_json(const PipelineConfig& c) {
    // threads and output_dir never change results, so they stay out of the
    // report and runs with different settings compare byte for byte.
    return json{{"accounts", c.accounts.generic_string()},
                {"retweets", c.retweets.generic_string()},
                {"ratings", c.ratings.generic_string()},
                {"alpha_projection", c.alpha_projection},
                {"alpha_blocks", c.alpha_blocks},
                {"lpa_runs", c.lpa_runs},
                {"ensemble_samples", c.ensemble_samples},
                {"master_seed", c.master_seed},
                {"strict_ids", c.strict_ids},
                {"lpa_weighted", c.lpa_weighted},
                {"min_seed_community", c.min_seed_community},
                {"projection_fdr", fdr_method_name(c.projection_fdr)},
                {"informative_rule", informative_rule_name(c.informative_rule)}};
}

template <class T>
json matrix_json(const SectorMatrix<T>& m) {
    json out = json::object();
    for (auto s : kAllSectors) {
        json row = json::object();
        for (auto t : kAllSectors)
            row[std::string(sector_name(t))] = m[index_of(s)][index_of(t)];
        out[std::string(sector_name(s))] = std::move(row);
    }
    return out;
}

json community_json(const CommunityReport& c) {
    json sectors = json::array();
    for (auto s : kAllSectors) {
        const auto k = index_of(s);
        sectors.push_back({{"sector", sector_name(s)},
                           {"size", c.sizes[k]},
                           {"ensemble_mean", c.ensemble_mean[k]},
                           {"pvalue", c.pvalue[k]},
                           {"significant", c.significant[k]},
                           {"verified", c.stats.verified[k]},
                           {"verified_share", c.stats.verified_share[k]},
                           {"verified_fraction", c.stats.verified_fraction[k]}});
    }
    const auto& cls = c.classification;
    json classification{{"informative", cls.informative},
                        {"strength", strength_name(cls.strength)},
                        {"dominance", dominance_name(cls.dominance)},
                        {"dominant_sector", nullptr},
                        {"dominance_tie", cls.dominance_tie}};
    if (cls.dominant_sector)
        classification["dominant_sector"] = sector_name(*cls.dominant_sector);
    return json{{"label", c.label},
                {"nodes", c.nodes},
                {"edges", c.edges},
                {"weight", c.weight},
                {"verified", c.verified},
                {"classification", std::move(classification)},
                {"sectors", std::move(sectors)},
                {"ensemble_samples", c.ensemble_samples},
                {"dcm_residual", c.dcm_residual},
                {"scc",
                 {{"node_share", c.stats.scc_node_share},
                  {"edge_share", c.stats.scc_edge_share},
                  {"density", c.stats.scc_density}}},
                {"flows",
                 {{"edges", matrix_json(c.stats.edges)},
                  {"weight", matrix_json(c.stats.weight)},
                  {"untrusted", matrix_json(c.stats.untrusted)},
                  {"untrusted_share", matrix_json(c.stats.untrusted_share)},
                  {"untrusted_total", c.stats.untrusted_total}}}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path.string());
    out << text;
    out.close();
    if (!out)
        throw Error("write failed: " + path.string());
}

// white (p = 1) to dark red (p <= 1e-10)
std::string shade_color(double shade) {
    const double t = std::clamp(shade / 10.0, 0.0, 1.0);
    const int g = static_cast<int>(std::lround(255.0 * (1.0 - t)));
    char buf[8];
    std::snprintf(buf, sizeof buf, "#ff%02x%02x", g, g);
    return buf;
}

}  // namespace

std::string report_json(const RunReport& report) {
    json communities = json::array();
    for (const auto& c : report.community)
        communities.push_back(community_json(c));
    json root{{"config", config_json(report.config)},
              {"ingest", json(nlohmann::json(report.ingest))},
              {"projection", json(nlohmann::json(report.projection))},
              {"communities", json(nlohmann::json(report.communities))},
              {"total_nodes", report.total_nodes},
              {"unassigned_nodes", report.unassigned_nodes},
              {"unassigned_share", report.unassigned_share},
              {"community", std::move(communities)}};
    return root.dump(2) + "\n";
}

std::string bowtie_dot(const CommunityReport& c) {
    std::ostringstream out;
    out << "digraph bowtie_" << c.label << " {\n";
    out << "  rankdir=LR;\n";
    out << "  node [shape=circle, style=filled, fontname=\"Helvetica\"];\n";
    out << "  label=\"community " << c.label << ": " << strength_name(c.classification.strength) << ", "
        << dominance_name(c.classification.dominance) << "\";\n";
    for (auto s : kAllSectors) {
        const auto k = index_of(s);
        const double p = std::max(c.pvalue[k], 1e-300);
        const double shade = -std::log10(p);
        out << "  " << sector_name(s) << " [size=" << c.sizes[k] << ", shade=" << format_double(shade)
            << ", fillcolor=\"" << shade_color(shade) << "\", label=\"" << sector_name(s) << "\\n" << c.sizes[k]
            << "\"" << (c.significant[k] ? ", penwidth=2" : "") << "];\n";
    }
    for (auto s : kAllSectors)
        for (auto t : kAllSectors) {
            const auto w = c.stats.weight[index_of(s)][index_of(t)];
            if (w == 0 || s == t)
                continue;
            out << "  " << sector_name(s) << " -> " << sector_name(t) << " [weight=" << w << ", label=\"" << w
                << "\"];\n";
        }
    out << "}\n";
    return out.str();
}

std::vector<std::filesystem::path> emit_report(const RunReport& report, const std::filesystem::path& directory) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    const fs::path staging = directory / ".staging";
    fs::remove_all(staging);
    fs::create_directories(staging);

    std::vector<std::string> names;
    try {
        write_text(staging / "report.json", report_json(report));
        names.push_back("report.json");
        for (const auto& c : report.community) {
            const auto stem = "community_" + std::to_string(c.label);
            std::string table = "node,sector\n";
            for (const auto& [name, sector] : c.members)
                table += csv_escape(name) + "," + std::string(sector_name(sector)) + "\n";
            write_text(staging / (stem + "_sectors.csv"), table);
            names.push_back(stem + "_sectors.csv");
            write_text(staging / (stem + "_bowtie.dot"), bowtie_dot(c));
            names.push_back(stem + "_bowtie.dot");
        }
    } catch (...) {
        std::error_code ec;
        fs::remove_all(staging, ec);
        throw;
    }

    std::vector<fs::path> out;
    for (const auto& n : names) {
        fs::rename(staging / n, directory / n);
        out.push_back(directory / n);
    }
    fs::remove_all(staging);
    return out;
}

}  // namespace infoflow
