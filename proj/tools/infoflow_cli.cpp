// infoflow: retweet communities, bow-tie sectors and their significance.
//
//   infoflow run --accounts a.csv --retweets r.csv --output-dir out
//   infoflow ingest --config run.cfg     (then project, communities, bowtie, report)
//
// Every flag can also be given in a key=value file passed with --config.
// Staged subcommands keep their artifacts in <output-dir>/stages.

#include <algorithm>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "infoflow/pipeline.hpp"

namespace fs = std::filesystem;
using namespace infoflow;

namespace {

// "--alpha-blocks,--alpha_blocks": config files may use either spelling.
std::string flag(const std::string& name) {
    std::string underscored = name;
    std::replace(underscored.begin(), underscored.end(), '-', '_');
    return "--" + name + ",--" + underscored;
}

fs::path stage_dir(const PipelineConfig& c) { return c.output_dir / "stages"; }

void print_paths(const std::vector<fs::path>& paths) {
    for (const auto& p : paths)
        std::cout << p.string() << '\n';
}

int cmd_ingest(const PipelineConfig& c) {
    const auto ingest = run_ingest(c);
    save_ingest(ingest, stage_dir(c));
    std::cout << "ingest: " << ingest.summary.accounts << " accounts, " << ingest.summary.digraph_edges
              << " retweet edges, " << ingest.summary.bipartite_edges << " bipartite links\n";
    return 0;
}

int cmd_project(const PipelineConfig& c) {
    const auto ingest = load_ingest(stage_dir(c));
    const auto project = run_projection(ingest, c);
    save_projection(project, ingest, stage_dir(c));
    std::cout << "project: " << project.summary.validated << " of " << project.summary.tested
              << " tested pairs validated\n";
    return 0;
}

int cmd_communities(const PipelineConfig& c) {
    const auto ingest = load_ingest(stage_dir(c));
    const auto project = load_projection(ingest, stage_dir(c));
    const auto communities = run_communities(ingest, project, c);
    save_communities(communities, ingest, project, stage_dir(c));
    std::cout << "communities: " << communities.split.communities.size() << " communities, "
              << communities.summary.unassigned_nodes << " unassigned nodes\n";
    return 0;
}

int cmd_bowtie(const PipelineConfig& c) {
    const auto ingest = load_ingest(stage_dir(c));
    const auto communities = load_communities(ingest, stage_dir(c));
    const auto bowties = run_bowtie(communities.split, c);
    save_bowtie(bowties, ingest, stage_dir(c));
    std::cout << "bowtie: " << bowties.size() << " communities tested\n";
    return 0;
}

int cmd_report(const PipelineConfig& c) {
    const auto ingest = load_ingest(stage_dir(c));
    const auto project = load_projection(ingest, stage_dir(c));
    const auto communities = load_communities(ingest, stage_dir(c));
    auto bowties = load_bowtie(ingest, communities.split, stage_dir(c));
    for (auto& b : bowties)
        b.classification = classify_bowtie(b.partition, c.informative_rule);
    const auto report = assemble_report(ingest, project.summary, communities.summary, bowties, c);
    print_paths(emit_report(report, c.output_dir));
    return 0;
}

int cmd_run(const PipelineConfig& c) {
    c.validate();
    // Everything is computed before anything is written, so a failing stage
    // leaves no partial output behind.
    const auto ingest = run_ingest(c);
    const auto project = run_projection(ingest, c);
    const auto communities = run_communities(ingest, project, c);
    const auto bowties = run_bowtie(communities.split, c);
    const auto report = assemble_report(ingest, project.summary, communities.summary, bowties, c);

    save_ingest(ingest, stage_dir(c));
    save_projection(project, ingest, stage_dir(c));
    save_communities(communities, ingest, project, stage_dir(c));
    save_bowtie(bowties, ingest, stage_dir(c));
    print_paths(emit_report(report, c.output_dir));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Retweet community detection and bow-tie analysis"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value file with any of the options below");
    app.allow_config_extras(CLI::config_extras_mode::error);

    PipelineConfig c;
    app.add_option("--accounts", c.accounts, "accounts table (id,verified[,screen_name])");
    app.add_option("--retweets", c.retweets, "retweets table (author_id,retweeter_id[,count][,urls])");
    app.add_option("--ratings", c.ratings, "domain ratings (domain,trusted)");
    app.add_option(flag("output-dir"), c.output_dir, "where reports and stage artifacts go")->capture_default_str();
    app.add_option(flag("alpha-projection"), c.alpha_projection, "FDR level for projection links")
        ->capture_default_str();
    app.add_option(flag("alpha-blocks"), c.alpha_blocks, "FDR level for the seven sector tests")->capture_default_str();
    app.add_option(flag("lpa-runs"), c.lpa_runs, "label propagation runs")->capture_default_str();
    app.add_option(flag("ensemble-samples"), c.ensemble_samples, "DCM draws per community")->capture_default_str();
    app.add_option(flag("master-seed"), c.master_seed, "seed for every random substream")->capture_default_str();
    app.add_option("--threads", c.threads, "worker threads, 0 for all cores")->capture_default_str();
    app.add_option(flag("strict-ids"), c.strict_ids, "reject retweets naming unknown accounts")->capture_default_str();
    app.add_option(flag("lpa-weighted"), c.lpa_weighted, "weight label votes by retweet count")->capture_default_str();
    app.add_option(flag("min-seed-community"), c.min_seed_community, "smallest verified community used as a seed")
        ->capture_default_str();
    const std::map<std::string, FdrMethod> fdr{{"BH", FdrMethod::BenjaminiHochberg},
                                               {"BY", FdrMethod::BenjaminiYekutieli}};
    app.add_option(flag("projection-fdr"), c.projection_fdr, "BH or BY")
        ->transform(CLI::CheckedTransformer(fdr, CLI::ignore_case));
    const std::map<std::string, InformativeRule> rules{{"majority", InformativeRule::Majority},
                                                       {"same-order", InformativeRule::SameOrder}};
    app.add_option(flag("informative-rule"), c.informative_rule, "majority or same-order")
        ->transform(CLI::CheckedTransformer(rules, CLI::ignore_case));

    const std::pair<const char*, const char*> subs[] = {
        {"ingest", "load inputs, build the retweet and bipartite graphs"},
        {"project", "fit the BiCM and validate the verified-account projection"},
        {"communities", "Louvain on the projection, then seeded label propagation"},
        {"bowtie", "bow-tie sectors and DCM ensemble tests per community"},
        {"report", "write report.json, sector tables and DOT diagrams"},
        {"run", "all stages"},
    };
    for (const auto& [name, help] : subs)
        app.add_subcommand(name, help)->fallthrough();

    CLI11_PARSE(app, argc, argv);

    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        c.validate();
        if (cmd == "ingest")
            return cmd_ingest(c);
        if (cmd == "project")
            return cmd_project(c);
        if (cmd == "communities")
            return cmd_communities(c);
        if (cmd == "bowtie")
            return cmd_bowtie(c);
        if (cmd == "report")
            return cmd_report(c);
        return cmd_run(c);
    } catch (const PipelineError& e) {
        std::cerr << "infoflow: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "infoflow: " << cmd << ": " << e.what() << '\n';
        return 1;
    }
}
