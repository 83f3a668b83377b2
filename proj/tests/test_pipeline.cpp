#include <doctest.h>

#include <cstdlib>
#include <regex>

#include "infoflow/pipeline.hpp"
#include "support/fixtures.hpp"

using namespace infoflow;
using fixtures::read_file;
using fixtures::ScratchDir;
using fixtures::write_file;

namespace {

PipelineConfig planted_config(const fixtures::PlantedCorpus& corpus) {
    PipelineConfig c;
    c.accounts = corpus.accounts;
    c.retweets = corpus.retweets;
    c.ratings = corpus.ratings;
    c.lpa_runs = 100;
    c.ensemble_samples = 300;
    c.master_seed = 12345;
    return c;
}

const CommunityReport& community_of(const RunReport& r, const std::string& member) {
    for (const auto& c : r.community)
        for (const auto& [name, sector] : c.members)
            if (name == member)
                return c;
    FAIL("no community holds " << member);
    return r.community.front();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(INFOFLOW_CLI) + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
}

}  // namespace

TEST_CASE("PipelineConfig::validate") {
    PipelineConfig c;
    CHECK_NOTHROW(c.validate());
    c.alpha_blocks = 1.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.alpha_projection = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.lpa_runs = 0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.ensemble_samples = 0;
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("run_pipeline on the planted corpus") {
    ScratchDir dir("pipeline");
    const auto corpus = fixtures::write_planted_corpus(dir.path());
    const auto config = planted_config(corpus);
    const auto report = run_pipeline(config);

    REQUIRE(report.community.size() == 2);
    const auto& planted = community_of(report, "v0");
    const auto& other = community_of(report, "w0");
    CHECK(planted.label != other.label);
    CHECK(planted.classification.informative);
    CHECK(planted.classification.strength == Strength::Strong);
    CHECK(planted.classification.dominance == Dominance::OutDominant);
    CHECK(planted.sizes[index_of(Sector::Scc)] == 5);
    CHECK(planted.verified == 5);
    CHECK(planted.stats.untrusted_total > 0);

    // every account is somewhere: community nodes + unassigned = all
    std::size_t total = report.unassigned_nodes;
    for (const auto& c : report.community)
        total += c.nodes;
    CHECK(total == report.total_nodes);
    CHECK(report.ingest.self_retweets_dropped == 0);
    CHECK(report.projection.validated == 20);

    SUBCASE("same seed, same report") {
        CHECK(report_json(run_pipeline(config)) == report_json(report));
    }
    SUBCASE("thread count does not matter") {
        auto c = config;
        c.threads = 4;
        CHECK(report_json(run_pipeline(c)) == report_json(report));
    }
}

TEST_CASE("run_pipeline errors name the stage") {
    ScratchDir dir("errors");
    PipelineConfig c;
    c.accounts = write_file(dir / "a.csv", "id,verified\n1,true\n2,false\n");
    c.retweets = write_file(dir / "r.csv", "author_id,retweeter_id\n");
    try {
        run_pipeline(c);
        FAIL("expected PipelineError");
    } catch (const PipelineError& e) {
        CHECK(e.stage() == "ingest");
        CHECK(std::string(e.what()).find("no edges") != std::string::npos);
    }
    c.retweets = dir / "missing.csv";
    CHECK_THROWS_AS(run_pipeline(c), PipelineError);
    c.retweets = write_file(dir / "r2.csv", "author_id,retweeter_id\n1,2\n");
    c.alpha_blocks = 3;
    try {
        run_pipeline(c);
        FAIL("expected PipelineError");
    } catch (const PipelineError& e) {
        CHECK(e.stage() == "config");
    }
}

TEST_CASE("emit_report") {
    ScratchDir dir("emit");
    SUBCASE("empty report writes only the summary") {
        RunReport r;
        const auto files = emit_report(r, dir / "out");
        REQUIRE(files.size() == 1);
        CHECK(files[0].filename() == "report.json");
        CHECK_FALSE(std::filesystem::exists(dir / "out" / ".staging"));
    }
    SUBCASE("one community writes a table and a diagram") {
        RunReport r;
        CommunityReport c;
        c.label = 3;
        c.nodes = 4;
        c.sizes = SectorSizes{1, 0, 3, 0, 0, 0, 0};
        c.pvalue.fill(1.0);
        c.pvalue[index_of(Sector::Out)] = 0.001;
        c.members = {{"a", Sector::Scc}, {"b", Sector::Out}, {"c", Sector::Out}, {"d", Sector::Out}};
        c.classification = classify_bowtie(c.sizes);
        r.community.push_back(c);
        const auto files = emit_report(r, dir / "out");
        CHECK(files.size() == 3);
        CHECK(read_file(dir / "out" / "community_3_sectors.csv") == "node,sector\na,SCC\nb,OUT\nc,OUT\nd,OUT\n");
        const auto dot = read_file(dir / "out" / "community_3_bowtie.dot");
        CHECK(dot.find("OUT [size=3, shade=3") != std::string::npos);
    }
    SUBCASE("an unwritable target fails with its path") {
        write_file(dir / "blocker", "x");
        CHECK_THROWS(emit_report(RunReport{}, dir / "blocker" / "out"));
    }
}

TEST_CASE("bowtie_dot: the OUT-dominant community has the largest OUT node") {
    ScratchDir dir("dot");
    const auto corpus = fixtures::write_planted_corpus(dir.path());
    const auto report = run_pipeline(planted_config(corpus));
    const auto dot = bowtie_dot(community_of(report, "v0"));
    std::regex node_re(R"((\w+) \[size=(\d+))");
    std::string largest;
    long best = -1;
    for (auto it = std::sregex_iterator(dot.begin(), dot.end(), node_re); it != std::sregex_iterator(); ++it) {
        const long size = std::stol((*it)[2]);
        if (size > best) {
            best = size;
            largest = (*it)[1];
        }
    }
    CHECK(largest == "OUT");
}

TEST_CASE("stage artifacts round trip") {
    ScratchDir dir("stages");
    const auto corpus = fixtures::write_planted_corpus(dir.path());
    const auto config = planted_config(corpus);
    const auto ingest = run_ingest(config);
    save_ingest(ingest, dir / "s");
    const auto ingest2 = load_ingest(dir / "s");
    CHECK(ingest2.digraph == ingest.digraph);
    CHECK(ingest2.bipartite.top_adj == ingest.bipartite.top_adj);
    CHECK(ingest2.urls.size() == ingest.urls.size());

    const auto project = run_projection(ingest, config);
    save_projection(project, ingest, dir / "s");
    const auto project2 = load_projection(ingest2, dir / "s");
    CHECK(project2.projection.links.size() == project.projection.links.size());
    CHECK(project2.projection.graph.edges().size() == project.projection.graph.edges().size());

    const auto comm = run_communities(ingest, project, config);
    save_communities(comm, ingest, project, dir / "s");
    const auto comm2 = load_communities(ingest2, dir / "s");
    CHECK(comm2.labels.label == comm.labels.label);
    CHECK(comm2.split.communities.size() == comm.split.communities.size());

    const auto bow = run_bowtie(comm.split, config);
    save_bowtie(bow, ingest, dir / "s");
    const auto bow2 = load_bowtie(ingest2, comm2.split, dir / "s");
    const auto a = assemble_report(ingest, project.summary, comm.summary, bow, config);
    const auto b = assemble_report(ingest2, project2.summary, comm2.summary, bow2, config);
    CHECK(report_json(a) == report_json(b));
}

TEST_CASE("command line: staged subcommands match run") {
    ScratchDir dir("cli");
    const auto corpus = fixtures::write_planted_corpus(dir.path());
    write_file(dir / "run.cfg", "# planted corpus\naccounts=" + corpus.accounts.string() +
                                    "\nretweets=" + corpus.retweets.string() + "\nratings=" + corpus.ratings.string() +
                                    "\nlpa_runs=100\nensemble-samples=200\nmaster-seed=9\n");
    const std::string cfg = "--config " + (dir / "run.cfg").string();
    const std::string staged = " --output-dir " + (dir / "staged").string();
    for (const char* sub : {"ingest", "project", "communities", "bowtie", "report"})
        REQUIRE(run_cli(std::string(sub) + " " + cfg + staged) == 0);
    REQUIRE(run_cli("run " + cfg + " --threads 2 --output-dir " + (dir / "whole").string()) == 0);
    CHECK(read_file(dir / "staged" / "report.json") == read_file(dir / "whole" / "report.json"));
    CHECK(read_file(dir / "whole" / "report.json").find("\"lpa_runs\": 100") != std::string::npos);

    SUBCASE("failures exit non-zero and leave no report") {
        write_file(dir / "empty.csv", "author_id,retweeter_id\n");
        CHECK(run_cli("run --accounts " + corpus.accounts.string() + " --retweets " + (dir / "empty.csv").string() +
                      " --output-dir " + (dir / "failed").string()) != 0);
        CHECK_FALSE(std::filesystem::exists(dir / "failed" / "report.json"));
        CHECK(run_cli("run " + cfg + " --alpha-blocks 1.5") != 0);
        write_file(dir / "bad.cfg", "no_such_option=1\n");
        CHECK(run_cli("run --config " + (dir / "bad.cfg").string()) != 0);
    }
}
