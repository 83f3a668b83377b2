#include <doctest.h>

#include "infoflow/ingest.hpp"
#include "support/fixtures.hpp"

using namespace infoflow;
using fixtures::ScratchDir;
using fixtures::write_file;

TEST_CASE("load_accounts") {
    ScratchDir dir("accounts");

    SUBCASE("header only gives an empty table") {
        auto t = load_accounts(write_file(dir / "a.csv", "id,verified,screen_name\n"));
        CHECK(t.empty());
    }
    SUBCASE("one verified account") {
        auto t = load_accounts(write_file(dir / "a.csv", "id,verified,screen_name\n42,true,alice\n"));
        REQUIRE(t.size() == 1);
        CHECK(t[0].id == "42");
        CHECK(t[0].verified);
        CHECK(t[0].screen_name == "alice");
        CHECK(t.at("42") == 0);
        CHECK(t.verified_ids() == std::vector<NodeId>{0});
    }
    SUBCASE("duplicate id reports its line") {
        const auto path = write_file(dir / "a.csv", "id,verified,screen_name\n1,true,a\n2,false,b\n1,false,c\n");
        try {
            load_accounts(path);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 4);
            CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
        }
    }
    SUBCASE("malformed verified flag") {
        CHECK_THROWS_AS(load_accounts(write_file(dir / "a.csv", "id,verified\n1,maybe\n")), ParseError);
    }
    SUBCASE("tab separated, optional screen name") {
        auto t = load_accounts(write_file(dir / "a.tsv", "id\tverified\n7\t0\n8\tyes\n"));
        REQUIRE(t.size() == 2);
        CHECK_FALSE(t[0].verified);
        CHECK(t[1].verified);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_accounts(dir / "nope.csv"), Error);
    }
}

TEST_CASE("load_retweets") {
    ScratchDir dir("retweets");
    auto accounts = load_accounts(write_file(dir / "a.csv", "id,verified\nA,true\nB,false\n"));

    SUBCASE("repeated pair aggregates") {
        auto load = load_retweets(write_file(dir / "r.csv", "author_id,retweeter_id\nA,B\nA,B\n"), accounts);
        REQUIRE(load.records.size() == 1);
        CHECK(load.records[0].author == 0);
        CHECK(load.records[0].retweeter == 1);
        CHECK(load.records[0].count == 2);
        CHECK(load.rows == 2);
    }
    SUBCASE("self retweet is dropped and counted") {
        auto load = load_retweets(write_file(dir / "r.csv", "author_id,retweeter_id\nA,A\n"), accounts);
        CHECK(load.records.empty());
        CHECK(load.self_retweets_dropped == 1);
    }
    SUBCASE("empty file") {
        auto load = load_retweets(write_file(dir / "r.csv", ""), accounts);
        CHECK(load.records.empty());
        CHECK(load.rows == 0);
    }
    SUBCASE("explicit counts and urls") {
        auto load = load_retweets(
            write_file(dir / "r.csv", "author_id,retweeter_id,count,urls\nA,B,3,https://www.Example.com/x|http://b.org\nA,B,1,\n"),
            accounts);
        REQUIRE(load.records.size() == 1);
        CHECK(load.records[0].count == 4);
        CHECK(load.records[0].urls() == std::vector<std::string>{"example.com", "b.org"});
    }
    SUBCASE("unknown ids") {
        const auto path = write_file(dir / "r.csv", "author_id,retweeter_id\nA,C\n");
        auto copy = accounts;
        CHECK_THROWS_AS(load_retweets(path, copy, UnknownIdPolicy::Reject), ParseError);
        auto load = load_retweets(path, copy, UnknownIdPolicy::AutoRegister);
        CHECK(load.auto_registered == 1);
        REQUIRE(copy.size() == 3);
        CHECK_FALSE(copy[2].verified);
    }
    SUBCASE("bad count") {
        CHECK_THROWS_AS(load_retweets(write_file(dir / "r.csv", "author_id,retweeter_id,count\nA,B,0\n"), accounts),
                        ParseError);
    }
}

TEST_CASE("load_ratings") {
    ScratchDir dir("ratings");
    SUBCASE("domain is normalized") {
        auto r = load_ratings(write_file(dir / "n.csv", "domain,trusted\nExample.COM,false\n"));
        REQUIRE(r.size() == 1);
        CHECK(r.at("example.com") == false);
    }
    SUBCASE("empty") {
        CHECK(load_ratings(write_file(dir / "n.csv", "domain,trusted\n")).empty());
    }
    SUBCASE("conflicting duplicate") {
        CHECK_THROWS_AS(load_ratings(write_file(dir / "n.csv", "domain,trusted\na.com,true\nA.com,false\n")),
                        ParseError);
    }
    SUBCASE("agreeing duplicate is fine") {
        CHECK(load_ratings(write_file(dir / "n.csv", "domain,trusted\na.com,true\na.com,true\n")).size() == 1);
    }
}

TEST_CASE("normalize_domain") {
    CHECK(normalize_domain("https://www.Example.com/path?q=1") == "example.com");
    CHECK(normalize_domain("http://user:pw@news.example.org:8080/") == "example.org");
    CHECK(normalize_domain("bbc.co.uk/news") == "bbc.co.uk");
    CHECK(normalize_domain("") == "");
}

namespace {

// accounts: 0 V1 (verified), 1 V2 (verified), 2 u1, 3 u2
AccountTable four_accounts() {
    AccountTable t;
    t.add({"V1", true, ""});
    t.add({"V2", true, ""});
    t.add({"u1", false, ""});
    t.add({"u2", false, ""});
    return t;
}

RetweetRecord rec(NodeId a, NodeId r, std::uint64_t c = 1, std::vector<std::string> urls = {}) {
    RetweetRecord x;
    x.author = a;
    x.retweeter = r;
    x.count = c;
    if (!urls.empty())
        x.url_batches.push_back({c, std::move(urls)});
    return x;
}

}  // namespace

TEST_CASE("build_bipartite") {
    const auto accounts = four_accounts();
    SUBCASE("direction is discarded") {
        auto g = build_bipartite({rec(0, 2), rec(3, 1)}, accounts);
        CHECK(g.top == std::vector<NodeId>{0, 1});
        CHECK(g.bottom == std::vector<NodeId>{2, 3});
        CHECK(g.edge_count() == 2);
        CHECK(g.linked(0, 0));
        CHECK(g.linked(1, 1));
        CHECK_FALSE(g.linked(0, 1));
    }
    SUBCASE("verified-verified and unverified-unverified are excluded") {
        auto g = build_bipartite({rec(0, 1), rec(2, 3)}, accounts);
        CHECK(g.edge_count() == 0);
        CHECK(g.top.empty());
        CHECK(g.bottom.empty());
    }
    SUBCASE("both directions give one link") {
        auto once = build_bipartite({rec(0, 2)}, accounts);
        auto twice = build_bipartite({rec(0, 2), rec(2, 0)}, accounts);
        CHECK(twice.edge_count() == 1);
        CHECK(once.top_adj == twice.top_adj);
        CHECK(once.bottom_adj == twice.bottom_adj);
    }
}

TEST_CASE("build_retweet_digraph") {
    const auto accounts = four_accounts();
    SUBCASE("single retweet") {
        auto g = build_retweet_digraph({rec(0, 1)}, accounts);
        CHECK(g.node_count() == 4);
        CHECK(g.edge_count() == 1);
        CHECK(g.weight(0, 1) == 1);
        CHECK(g.weight(1, 0) == 0);
    }
    SUBCASE("weights per direction") {
        auto g = build_retweet_digraph({rec(0, 1, 2), rec(1, 0, 1)}, accounts);
        CHECK(g.weight(0, 1) == 2);
        CHECK(g.weight(1, 0) == 1);
        CHECK(g.total_weight() == 3);
    }
    SUBCASE("no records leaves isolated nodes") {
        auto g = build_retweet_digraph({}, accounts);
        CHECK(g.node_count() == 4);
        CHECK(g.edge_count() == 0);
    }
}

TEST_CASE("annotate_urls") {
    const RatingsTable ratings{{"bad.com", false}, {"good.com", true}};
    auto urls = annotate_urls({rec(0, 1, 1, {"bad.com"}), rec(0, 2, 1, {"unknown.com"}), rec(0, 3, 1, {"good.com"}),
                               rec(1, 2, 2)},
                              ratings);
    CHECK(urls.at({0, 1}).total_urls == 1);
    CHECK(urls.at({0, 1}).untrusted_urls == 1);
    CHECK(urls.at({0, 1}).untrusted_retweets == 1);
    // unrated domains never count as untrusted
    CHECK(urls.at({0, 2}).total_urls == 1);
    CHECK(urls.at({0, 2}).untrusted_urls == 0);
    CHECK(urls.at({0, 3}).untrusted_urls == 0);
    CHECK((urls.count({1, 2}) == 0 || urls.at({1, 2}).total_urls == 0));
}
