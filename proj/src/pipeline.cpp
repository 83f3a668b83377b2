#include "infoflow/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>

#include <json.hpp>

#include "infoflow/csv.hpp"
#include "infoflow/parallel.hpp"
#include "infoflow/random.hpp"

namespace infoflow {

using json = nlohmann::json;

std::string_view fdr_method_name(FdrMethod m) {
    return m == FdrMethod::BenjaminiHochberg ? "BH" : "BY";
}

std::string_view informative_rule_name(InformativeRule r) {
    return r == InformativeRule::Majority ? "majority" : "same-order";
}

void PipelineConfig::validate() const {
    if (!(alpha_projection > 0.0 && alpha_projection < 1.0))
        throw Error("alpha_projection must lie in (0,1)");
    if (!(alpha_blocks > 0.0 && alpha_blocks < 1.0))
        throw Error("alpha_blocks must lie in (0,1)");
    if (lpa_runs < 1)
        throw Error("lpa_runs must be at least 1");
    if (ensemble_samples < 1)
        throw Error("ensemble_samples must be at least 1");
    if (min_seed_community < 1)
        throw Error("min_seed_community must be at least 1");
}

namespace {

template <class Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const PipelineError&) {
        throw;
    } catch (const std::exception& e) {
        throw PipelineError(name, e.what());
    }
}

NodeNamer account_namer(const AccountTable& accounts) {
    return [&accounts](NodeId id) { return accounts[id].id; };
}

NodeResolver account_resolver(const AccountTable& accounts) {
    return [&accounts](std::string_view name) { return accounts.at(name); };
}

}  // namespace

// ---------------------------------------------------------------------------
// Stages

IngestStage run_ingest(const PipelineConfig& config) {
    return stage("ingest", [&] {
        IngestStage out;
        out.accounts = load_accounts(config.accounts);
        const auto load = load_retweets(config.retweets, out.accounts,
                                        config.strict_ids ? UnknownIdPolicy::Reject : UnknownIdPolicy::AutoRegister);
        if (load.records.empty())
            throw Error("no edges");
        RatingsTable ratings;
        if (!config.ratings.empty())
            ratings = load_ratings(config.ratings);

        out.digraph = build_retweet_digraph(load.records, out.accounts);
        out.bipartite = build_bipartite(load.records, out.accounts);
        out.urls = annotate_urls(load.records, ratings);

        auto& s = out.summary;
        s.accounts = out.accounts.size();
        s.verified_accounts = out.accounts.verified_ids().size();
        s.rows = load.rows;
        s.records = load.records.size();
        s.self_retweets_dropped = load.self_retweets_dropped;
        s.auto_registered = load.auto_registered;
        s.digraph_edges = out.digraph.edge_count();
        s.digraph_weight = out.digraph.total_weight();
        s.bipartite_top = out.bipartite.top.size();
        s.bipartite_bottom = out.bipartite.bottom.size();
        s.bipartite_edges = out.bipartite.edge_count();
        s.rated_domains = ratings.size();
        return out;
    });
}

ProjectStage run_projection(const IngestStage& ingest, const PipelineConfig& config) {
    return stage("project", [&] {
        ProjectStage out;
        const auto& bg = ingest.bipartite;
        BipartiteDegrees degrees;
        for (const auto& row : bg.top_adj)
            degrees.top.push_back(static_cast<std::uint32_t>(row.size()));
        for (const auto& col : bg.bottom_adj)
            degrees.bottom.push_back(static_cast<std::uint32_t>(col.size()));
        out.fit = fit_bicm(degrees);
        out.projection = validated_projection(bg, out.fit, {config.alpha_projection, config.projection_fdr, config.threads});

        auto& s = out.summary;
        s.hypotheses = out.projection.hypotheses;
        s.tested = out.projection.tested;
        s.validated = out.projection.links.size();
        s.alpha = config.alpha_projection;
        s.fdr_method = std::string(fdr_method_name(config.projection_fdr));
        s.bicm_residual = out.fit.report.residual;
        s.bicm_iterations = out.fit.report.iterations;
        return out;
    });
}

CommunityStage run_communities(const IngestStage& ingest, const ProjectStage& project, const PipelineConfig& config) {
    return stage("communities", [&] {
        CommunityStage out;
        const auto& graph = project.projection.graph;
        out.ucm = fit_ucm(degrees_of(graph));
        out.verified_partition = louvain_ucm(graph, out.ucm, substream_seed(config.master_seed, "louvain"));

        std::vector<std::size_t> size(out.verified_partition.count, 0);
        for (auto c : out.verified_partition.community)
            ++size[c];
        std::set<Label> seeding;
        for (std::size_t v = 0; v < graph.node_count(); ++v) {
            const auto c = out.verified_partition.community[v];
            if (size[c] >= config.min_seed_community) {
                out.seeds[graph.node_id(v)] = c;
                seeding.insert(c);
            }
        }
        if (out.seeds.empty())
            throw Error("no verified community reaches " + std::to_string(config.min_seed_community) +
                        " members; nothing to propagate");

        LpaOptions lpa;
        lpa.runs = config.lpa_runs;
        lpa.seed = substream_seed(config.master_seed, "lpa");
        lpa.threads = config.threads;
        lpa.weighted = config.lpa_weighted;
        out.labels = seeded_label_propagation(ingest.digraph, out.seeds, lpa);
        out.split = extract_communities(ingest.digraph, out.labels);

        auto& s = out.summary;
        s.verified_communities = out.verified_partition.count;
        s.modularity = modularity_ucm(graph, out.verified_partition, out.ucm);
        s.ucm_residual = out.ucm.report.residual;
        s.seed_communities = seeding.size();
        s.seeds = out.seeds.size();
        s.lpa_runs = config.lpa_runs;
        s.unassigned_nodes = out.split.unassigned_nodes;
        s.cross_edges = out.split.cross_edges();
        return out;
    });
}

std::vector<BowtieResult> run_bowtie(const CommunitySplit& split, const PipelineConfig& config) {
    return stage("bowtie", [&] {
        std::vector<BowtieResult> out;
        for (const auto& community : split.communities) {
            BowtieResult r;
            r.label = community.label;
            r.graph = community.graph;
            r.partition = bowtie_decompose(community.graph);
            EnsembleOptions ens;
            ens.samples = config.ensemble_samples;
            ens.seed = substream_seed(config.master_seed, "ensemble", community.label);
            ens.threads = config.threads;
            r.test = ensemble_block_pvalues(community.graph, ens);
            r.significant = fdr_blocks(r.test.pvalue, config.alpha_blocks);
            r.classification = classify_bowtie(r.partition, config.informative_rule);
            out.push_back(std::move(r));
        }
        return out;
    });
}

RunReport assemble_report(const IngestStage& ingest, const ProjectionSummary& projection,
                          const CommunitySummary& communities, const std::vector<BowtieResult>& bowties,
                          const PipelineConfig& config) {
    return stage("report", [&] {
        RunReport report;
        report.ingest = ingest.summary;
        report.projection = projection;
        report.communities = communities;
        report.config = config;
        report.total_nodes = ingest.digraph.node_count();
        std::size_t assigned = 0;
        for (const auto& b : bowties) {
            CommunityReport c;
            c.label = b.label;
            c.nodes = b.graph.node_count();
            c.edges = b.graph.edge_count();
            c.weight = b.graph.total_weight();
            c.sizes = b.partition.sizes();
            c.classification = b.classification;
            c.pvalue = b.test.pvalue;
            c.significant = b.significant;
            for (auto s : kAllSectors)
                c.ensemble_mean[index_of(s)] = b.test.ensemble_mean(s);
            c.ensemble_samples = b.test.ensemble.sample_count;
            c.dcm_residual = b.test.fit_residual;
            c.stats = sector_stats(b.graph, b.partition, ingest.accounts, ingest.urls);
            for (auto v : c.stats.verified)
                c.verified += v;
            for (std::size_t v = 0; v < b.partition.node_count(); ++v)
                c.members.emplace_back(ingest.accounts[b.partition.nodes()[v]].id, b.partition.sector_at(v));
            assigned += c.nodes;
            report.community.push_back(std::move(c));
        }
        report.unassigned_nodes = report.total_nodes - assigned;
        if (report.total_nodes > 0)
            report.unassigned_share =
                100.0 * static_cast<double>(report.unassigned_nodes) / static_cast<double>(report.total_nodes);
        return report;
    });
}

RunReport run_pipeline(const PipelineConfig& config) {
    stage("config", [&] {
        config.validate();
        return 0;
    });
    const auto ingest = run_ingest(config);
    const auto project = run_projection(ingest, config);
    const auto communities = run_communities(ingest, project, config);
    const auto bowties = run_bowtie(communities.split, config);
    return assemble_report(ingest, project.summary, communities.summary, bowties, config);
}

// ---------------------------------------------------------------------------
// Artifacts

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path.string());
    return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& path) {
    out.close();
    if (!out)
        throw Error("write failed: " + path.string());
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

void write_json(const json& j, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    close_out(out, path);
}

std::uint64_t parse_uint(const CsvReader& reader, std::string_view s) {
    std::uint64_t value = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc() || end != s.data() + s.size())
        reader.fail("expected a non-negative integer, got '" + std::string(s) + "'");
    return value;
}

}  // namespace

void to_json(json& j, const IngestSummary& s) {
    j = json{{"accounts", s.accounts},
             {"verified_accounts", s.verified_accounts},
             {"rows", s.rows},
             {"records", s.records},
             {"self_retweets_dropped", s.self_retweets_dropped},
             {"auto_registered", s.auto_registered},
             {"digraph_edges", s.digraph_edges},
             {"digraph_weight", s.digraph_weight},
             {"bipartite_top", s.bipartite_top},
             {"bipartite_bottom", s.bipartite_bottom},
             {"bipartite_edges", s.bipartite_edges},
             {"rated_domains", s.rated_domains}};
}

void from_json(const json& j, IngestSummary& s) {
    j.at("accounts").get_to(s.accounts);
    j.at("verified_accounts").get_to(s.verified_accounts);
    j.at("rows").get_to(s.rows);
    j.at("records").get_to(s.records);
    j.at("self_retweets_dropped").get_to(s.self_retweets_dropped);
    j.at("auto_registered").get_to(s.auto_registered);
    j.at("digraph_edges").get_to(s.digraph_edges);
    j.at("digraph_weight").get_to(s.digraph_weight);
    j.at("bipartite_top").get_to(s.bipartite_top);
    j.at("bipartite_bottom").get_to(s.bipartite_bottom);
    j.at("bipartite_edges").get_to(s.bipartite_edges);
    j.at("rated_domains").get_to(s.rated_domains);
}

void to_json(json& j, const ProjectionSummary& s) {
    j = json{{"hypotheses", s.hypotheses},       {"tested", s.tested},
             {"validated", s.validated},         {"alpha", s.alpha},
             {"fdr_method", s.fdr_method},       {"bicm_residual", s.bicm_residual},
             {"bicm_iterations", s.bicm_iterations}};
}

void from_json(const json& j, ProjectionSummary& s) {
    j.at("hypotheses").get_to(s.hypotheses);
    j.at("tested").get_to(s.tested);
    j.at("validated").get_to(s.validated);
    j.at("alpha").get_to(s.alpha);
    j.at("fdr_method").get_to(s.fdr_method);
    j.at("bicm_residual").get_to(s.bicm_residual);
    j.at("bicm_iterations").get_to(s.bicm_iterations);
}

void to_json(json& j, const CommunitySummary& s) {
    j = json{{"verified_communities", s.verified_communities},
             {"modularity", s.modularity},
             {"ucm_residual", s.ucm_residual},
             {"seed_communities", s.seed_communities},
             {"seeds", s.seeds},
             {"lpa_runs", s.lpa_runs},
             {"unassigned_nodes", s.unassigned_nodes},
             {"cross_edges", s.cross_edges}};
}

void from_json(const json& j, CommunitySummary& s) {
    j.at("verified_communities").get_to(s.verified_communities);
    j.at("modularity").get_to(s.modularity);
    j.at("ucm_residual").get_to(s.ucm_residual);
    j.at("seed_communities").get_to(s.seed_communities);
    j.at("seeds").get_to(s.seeds);
    j.at("lpa_runs").get_to(s.lpa_runs);
    j.at("unassigned_nodes").get_to(s.unassigned_nodes);
    j.at("cross_edges").get_to(s.cross_edges);
}

void save_ingest(const IngestStage& stage, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto name = account_namer(stage.accounts);
    {
        const auto path = dir / "accounts.csv";
        auto out = open_out(path);
        out << "id,verified,screen_name\n";
        for (const auto& a : stage.accounts)
            out << csv_escape(a.id) << ',' << (a.verified ? "true" : "false") << ',' << csv_escape(a.screen_name)
                << '\n';
        close_out(out, path);
    }
    write_edge_list(stage.digraph, dir / "digraph.csv", name);
    {
        const auto path = dir / "bipartite.csv";
        auto out = open_out(path);
        out << "verified_id,unverified_id\n";
        for (std::size_t i = 0; i < stage.bipartite.top.size(); ++i)
            for (auto a : stage.bipartite.top_adj[i])
                out << csv_escape(name(stage.bipartite.top[i])) << ','
                    << csv_escape(name(stage.bipartite.bottom[a])) << '\n';
        close_out(out, path);
    }
    {
        const auto path = dir / "url_flows.csv";
        auto out = open_out(path);
        out << "author_id,retweeter_id,total_urls,untrusted_urls,untrusted_retweets\n";
        for (const auto& [key, c] : stage.urls)
            out << csv_escape(name(key.first)) << ',' << csv_escape(name(key.second)) << ',' << c.total_urls << ','
                << c.untrusted_urls << ',' << c.untrusted_retweets << '\n';
        close_out(out, path);
    }
    write_json(stage.summary, dir / "ingest.json");
}

IngestStage load_ingest(const std::filesystem::path& dir) {
    IngestStage stage;
    stage.accounts = load_accounts(dir / "accounts.csv");
    const auto resolve = account_resolver(stage.accounts);
    const auto all = stage.accounts.ids();
    stage.digraph = read_edge_list(dir / "digraph.csv", resolve, all);
    {
        CsvReader reader(dir / "bipartite.csv");
        std::vector<std::pair<NodeId, NodeId>> links;
        if (reader.has_header()) {
            const auto v = reader.require_column("verified_id");
            const auto u = reader.require_column("unverified_id");
            std::vector<std::string> f;
            while (reader.next(f))
                links.emplace_back(stage.accounts.at(f[v]), stage.accounts.at(f[u]));
        }
        stage.bipartite = bipartite_from_edges(links);
    }
    {
        CsvReader reader(dir / "url_flows.csv");
        if (reader.has_header()) {
            const auto a = reader.require_column("author_id");
            const auto r = reader.require_column("retweeter_id");
            const auto t = reader.require_column("total_urls");
            const auto uu = reader.require_column("untrusted_urls");
            const auto ur = reader.require_column("untrusted_retweets");
            std::vector<std::string> f;
            while (reader.next(f))
                stage.urls[{stage.accounts.at(f[a]), stage.accounts.at(f[r])}] =
                    UrlCounts{parse_uint(reader, f[t]), parse_uint(reader, f[uu]), parse_uint(reader, f[ur])};
        }
    }
    read_json(dir / "ingest.json").get_to(stage.summary);
    return stage;
}

void save_projection(const ProjectStage& stage, const IngestStage& ingest, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto name = account_namer(ingest.accounts);
    {
        const auto path = dir / "bicm_fit.csv";
        auto out = open_out(path);
        write_multipliers(out, stage.fit.top, ingest.bipartite.top, "top", name, true);
        write_multipliers(out, stage.fit.bottom, ingest.bipartite.bottom, "bottom", name, false);
        close_out(out, path);
    }
    write_projection(stage.projection, dir / "projection.csv", name);
    write_json(stage.summary, dir / "projection.json");
}

ProjectStage load_projection(const IngestStage& ingest, const std::filesystem::path& dir) {
    ProjectStage stage;
    read_json(dir / "projection.json").get_to(stage.summary);
    auto& p = stage.projection;
    p.alpha = stage.summary.alpha;
    p.method = stage.summary.fdr_method == "BY" ? FdrMethod::BenjaminiYekutieli : FdrMethod::BenjaminiHochberg;
    p.hypotheses = stage.summary.hypotheses;
    p.tested = stage.summary.tested;
    CsvReader reader(dir / "projection.csv");
    std::vector<WeightedEdge> edges;
    if (reader.has_header()) {
        const auto i = reader.require_column("i");
        const auto j = reader.require_column("j");
        const auto vm = reader.require_column("vmotifs");
        const auto pv = reader.require_column("pvalue");
        std::vector<std::string> f;
        while (reader.next(f)) {
            const NodeId a = ingest.accounts.at(f[i]);
            const NodeId b = ingest.accounts.at(f[j]);
            double value;
            try {
                value = parse_double(f[pv]);
            } catch (const Error& e) {
                reader.fail(e.what());
            }
            p.links.push_back({a, b, static_cast<std::uint32_t>(parse_uint(reader, f[vm])), value});
            edges.push_back({a, b, 1});
        }
    }
    p.graph = UndirectedGraph(ingest.bipartite.top, edges);
    return stage;
}

void save_communities(const CommunityStage& stage, const IngestStage& ingest, const ProjectStage& project,
                      const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto name = account_namer(ingest.accounts);
    const auto& graph = project.projection.graph;
    {
        const auto path = dir / "ucm_fit.csv";
        auto out = open_out(path);
        write_multipliers(out, stage.ucm.node, graph.nodes(), "node", name, true);
        close_out(out, path);
    }
    {
        const auto path = dir / "verified_communities.csv";
        auto out = open_out(path);
        out << "node,community,seed\n";
        for (std::size_t v = 0; v < graph.node_count(); ++v)
            out << csv_escape(name(graph.node_id(v))) << ',' << stage.verified_partition.community[v] << ','
                << (stage.seeds.count(graph.node_id(v)) ? "true" : "false") << '\n';
        close_out(out, path);
    }
    write_labels(stage.labels, dir / "labels.csv", name);
    {
        const auto path = dir / "cross_community_edges.csv";
        auto out = open_out(path);
        out << "source_label,target_label,edges,weight\n";
        for (const auto& [key, c] : stage.split.cross)
            out << key.first << ',' << key.second << ',' << c.edges << ',' << c.weight << '\n';
        close_out(out, path);
    }
    write_json(stage.summary, dir / "communities.json");
}

CommunityStage load_communities(const IngestStage& ingest, const std::filesystem::path& dir) {
    CommunityStage stage;
    read_json(dir / "communities.json").get_to(stage.summary);
    const auto& g = ingest.digraph;
    stage.labels.nodes.assign(g.nodes().begin(), g.nodes().end());
    stage.labels.label.assign(g.node_count(), kUnassigned);
    stage.labels.frequency.assign(g.node_count(), 0.0);
    CsvReader reader(dir / "labels.csv");
    if (reader.has_header()) {
        const auto n = reader.require_column("node");
        const auto l = reader.require_column("label");
        const auto fr = reader.require_column("frequency");
        std::vector<std::string> f;
        while (reader.next(f)) {
            const auto local = g.local_index(ingest.accounts.at(f[n]));
            if (!local)
                reader.fail("node not in the retweet graph");
            if (!f[l].empty())
                stage.labels.label[*local] = static_cast<Label>(parse_uint(reader, f[l]));
            try {
                stage.labels.frequency[*local] = parse_double(f[fr]);
            } catch (const Error& e) {
                reader.fail(e.what());
            }
        }
    }
    stage.split = extract_communities(g, stage.labels);
    return stage;
}

void save_bowtie(const std::vector<BowtieResult>& results, const IngestStage& ingest, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto name = account_namer(ingest.accounts);
    const auto sectors_path = dir / "bowtie_sectors.csv";
    const auto tests_path = dir / "bowtie_tests.csv";
    const auto ensemble_path = dir / "bowtie_ensemble.csv";
    auto sectors = open_out(sectors_path);
    auto tests = open_out(tests_path);
    auto ensemble = open_out(ensemble_path);
    sectors << "community,node,sector\n";
    tests << "community,sector,observed,ensemble_mean,pvalue,significant,samples,seed,dcm_residual\n";
    ensemble << "community,sample";
    for (auto s : kAllSectors)
        ensemble << ',' << sector_name(s);
    ensemble << '\n';
    for (const auto& r : results) {
        for (std::size_t v = 0; v < r.partition.node_count(); ++v)
            sectors << r.label << ',' << csv_escape(name(r.partition.nodes()[v])) << ','
                    << sector_name(r.partition.sector_at(v)) << '\n';
        for (auto s : kAllSectors)
            tests << r.label << ',' << sector_name(s) << ',' << r.test.observed[index_of(s)] << ','
                  << format_double(r.test.ensemble_mean(s)) << ',' << format_double(r.test.pvalue[index_of(s)]) << ','
                  << (r.significant[index_of(s)] ? "true" : "false") << ',' << r.test.ensemble.sample_count << ','
                  << r.test.ensemble.seed << ',' << format_double(r.test.fit_residual) << '\n';
        for (std::size_t k = 0; k < r.test.ensemble.sample_count; ++k) {
            ensemble << r.label << ',' << k;
            for (auto s : kAllSectors)
                ensemble << ',' << r.test.ensemble.sizes[index_of(s)][k];
            ensemble << '\n';
        }
    }
    close_out(sectors, sectors_path);
    close_out(tests, tests_path);
    close_out(ensemble, ensemble_path);
}

std::vector<BowtieResult> load_bowtie(const IngestStage& ingest, const CommunitySplit& split,
                                      const std::filesystem::path& dir) {
    std::map<Label, BowtieResult> by_label;
    for (const auto& c : split.communities) {
        auto& r = by_label[c.label];
        r.label = c.label;
        r.graph = c.graph;
    }
    const auto lookup = [&](const CsvReader& reader, const std::string& field) -> BowtieResult& {
        const auto it = by_label.find(static_cast<Label>(parse_uint(reader, field)));
        if (it == by_label.end())
            reader.fail("unknown community " + field);
        return it->second;
    };
    const auto sector_of = [](const CsvReader& reader, const std::string& field) {
        const auto s = parse_sector(field);
        if (!s)
            reader.fail("unknown sector '" + field + "'");
        return *s;
    };

    std::map<Label, std::vector<std::pair<NodeId, Sector>>> assigned;
    {
        CsvReader reader(dir / "bowtie_sectors.csv");
        const auto c = reader.require_column("community");
        const auto n = reader.require_column("node");
        const auto s = reader.require_column("sector");
        std::vector<std::string> f;
        while (reader.next(f)) {
            auto& r = lookup(reader, f[c]);
            assigned[r.label].emplace_back(ingest.accounts.at(f[n]), sector_of(reader, f[s]));
        }
    }
    for (auto& [label, r] : by_label) {
        auto rows = assigned[label];
        std::sort(rows.begin(), rows.end());
        std::vector<NodeId> nodes;
        std::vector<Sector> sectors;
        for (const auto& [id, s] : rows) {
            nodes.push_back(id);
            sectors.push_back(s);
        }
        if (!std::equal(nodes.begin(), nodes.end(), r.graph.nodes().begin(), r.graph.nodes().end()))
            throw Error("bowtie_sectors.csv does not match community " + std::to_string(label));
        r.partition = BowTiePartition(std::move(nodes), std::move(sectors));
    }
    {
        CsvReader reader(dir / "bowtie_tests.csv");
        const auto c = reader.require_column("community");
        const auto s = reader.require_column("sector");
        const auto obs = reader.require_column("observed");
        const auto pv = reader.require_column("pvalue");
        const auto sig = reader.require_column("significant");
        const auto samples = reader.require_column("samples");
        const auto seed = reader.require_column("seed");
        const auto resid = reader.require_column("dcm_residual");
        std::vector<std::string> f;
        while (reader.next(f)) {
            auto& r = lookup(reader, f[c]);
            const auto k = index_of(sector_of(reader, f[s]));
            r.test.observed[k] = parse_uint(reader, f[obs]);
            try {
                r.test.pvalue[k] = parse_double(f[pv]);
                r.test.fit_residual = parse_double(f[resid]);
            } catch (const Error& e) {
                reader.fail(e.what());
            }
            r.significant[k] = parse_bool(f[sig]).value_or(false);
            r.test.ensemble.sample_count = parse_uint(reader, f[samples]);
            r.test.ensemble.seed = parse_uint(reader, f[seed]);
        }
    }
    for (auto& [label, r] : by_label)
        for (auto& xs : r.test.ensemble.sizes)
            xs.assign(r.test.ensemble.sample_count, 0);
    {
        CsvReader reader(dir / "bowtie_ensemble.csv");
        const auto c = reader.require_column("community");
        const auto k = reader.require_column("sample");
        PerSector<std::size_t> cols{};
        for (auto s : kAllSectors)
            cols[index_of(s)] = reader.require_column(to_lower(sector_name(s)));
        std::vector<std::string> f;
        while (reader.next(f)) {
            auto& r = lookup(reader, f[c]);
            const auto sample = parse_uint(reader, f[k]);
            if (sample >= r.test.ensemble.sample_count)
                reader.fail("sample index out of range");
            for (std::size_t s = 0; s < kSectorCount; ++s)
                r.test.ensemble.sizes[s][sample] = static_cast<std::uint32_t>(parse_uint(reader, f[cols[s]]));
        }
    }
    std::vector<BowtieResult> out;
    for (auto& [label, r] : by_label) {
        r.classification = classify_bowtie(r.partition);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace infoflow
