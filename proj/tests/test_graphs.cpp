#include <doctest.h>

#include <random>

#include "infoflow/bowtie.hpp"
#include "infoflow/digraph.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace infoflow;
using Pairs = std::vector<std::pair<NodeId, NodeId>>;

TEST_CASE("DirectedGraph construction") {
    SUBCASE("parallel edges merge") {
        std::vector<WeightedEdge> e{{0, 1, 2}, {0, 1, 3}, {1, 0, 1}};
        DirectedGraph g({0, 1}, e);
        CHECK(g.edge_count() == 2);
        CHECK(g.weight(0, 1) == 5);
        CHECK(g.total_weight() == 6);
    }
    SUBCASE("invalid input") {
        std::vector<WeightedEdge> loop{{1, 1, 1}};
        CHECK_THROWS_AS(DirectedGraph({1}, loop), Error);
        std::vector<WeightedEdge> zero{{0, 1, 0}};
        CHECK_THROWS_AS(DirectedGraph({0, 1}, zero), Error);
        std::vector<WeightedEdge> unknown{{0, 9, 1}};
        CHECK_THROWS_AS(DirectedGraph({0, 1}, unknown), Error);
    }
    SUBCASE("sparse ids map to local indices") {
        std::vector<WeightedEdge> e{{40, 10, 1}};
        DirectedGraph g({40, 10, 20}, e);
        CHECK(g.node_id(0) == 10);
        CHECK(g.local_index(40) == 2);
        CHECK_FALSE(g.local_index(5).has_value());
        CHECK(g.in_degree(0) == 1);
        CHECK(g.out_degree(2) == 1);
    }
    SUBCASE("reversed twice is the identity") {
        std::mt19937_64 rng(3);
        auto g = fixtures::random_digraph(15, 0.2, rng);
        CHECK(g.reversed().reversed() == g);
    }
}

TEST_CASE("strongly_connected_components") {
    SUBCASE("two-cycle") {
        auto g = DirectedGraph::from_pairs(2, Pairs{{0, 1}, {1, 0}});
        CHECK(strongly_connected_components(g) == ComponentList{{0, 1}});
    }
    SUBCASE("DAG gives singletons") {
        auto g = DirectedGraph::from_pairs(3, Pairs{{0, 1}, {1, 2}, {0, 2}});
        CHECK(strongly_connected_components(g) == ComponentList{{0}, {1}, {2}});
    }
    SUBCASE("random graphs against the closure oracle") {
        std::mt19937_64 rng(11);
        for (int t = 0; t < 50; ++t) {
            auto g = fixtures::random_digraph(20, 0.02 + 0.01 * (t % 10), rng);
            const auto rep = oracle::scc_by_closure(g);
            const auto labels = scc_labels(g);
            for (std::size_t u = 0; u < 20; ++u)
                for (std::size_t v = 0; v < 20; ++v)
                    REQUIRE((rep[u] == rep[v]) == (labels.component[u] == labels.component[v]));
            std::size_t distinct = 0;
            for (std::size_t u = 0; u < 20; ++u)
                distinct += rep[u] == u;
            CHECK(strongly_connected_components(g).size() == distinct);
        }
    }
    SUBCASE("deep path does not overflow the stack") {
        const std::size_t n = 200000;
        Pairs p;
        for (NodeId u = 0; u + 1 < n; ++u)
            p.emplace_back(u, u + 1);
        p.emplace_back(static_cast<NodeId>(n - 1), 0);
        CHECK(strongly_connected_components(DirectedGraph::from_pairs(n, p)).size() == 1);
    }
}

TEST_CASE("weakly_connected_components") {
    SUBCASE("fan-out is one component") {
        auto g = DirectedGraph::from_pairs(3, Pairs{{0, 1}, {0, 2}});
        CHECK(weakly_connected_components(g) == ComponentList{{0, 1, 2}});
    }
    SUBCASE("empty graph") {
        CHECK(weakly_connected_components(DirectedGraph{}).empty());
    }
    SUBCASE("random graphs against flood fill") {
        std::mt19937_64 rng(5);
        for (int t = 0; t < 50; ++t) {
            auto g = fixtures::random_digraph(25, 0.03, rng);
            const auto comp = oracle::wcc_by_flood(g);
            const auto wcc = weakly_connected_components(g);
            std::vector<std::size_t> mine(25);
            for (std::size_t c = 0; c < wcc.size(); ++c)
                for (auto id : wcc[c])
                    mine[id] = c;
            for (std::size_t u = 0; u < 25; ++u)
                for (std::size_t v = 0; v < 25; ++v)
                    REQUIRE((comp[u] == comp[v]) == (mine[u] == mine[v]));
        }
    }
}

TEST_CASE("bowtie_decompose") {
    SUBCASE("one node per sector") {
        // 1<->2 core, 0 -> 1 IN, 2 -> 3 OUT, 0 -> 4 -> 3 tube,
        // 0 -> 5 in-tendril, 6 -> 3 out-tendril, 7 isolated
        auto g = DirectedGraph::from_pairs(
            8, Pairs{{1, 2}, {2, 1}, {0, 1}, {2, 3}, {0, 4}, {4, 3}, {0, 5}, {6, 3}});
        const auto p = bowtie_decompose(g);
        CHECK(p.sector_of(1) == Sector::Scc);
        CHECK(p.sector_of(2) == Sector::Scc);
        CHECK(p.sector_of(0) == Sector::In);
        CHECK(p.sector_of(3) == Sector::Out);
        CHECK(p.sector_of(4) == Sector::Tubes);
        CHECK(p.sector_of(5) == Sector::InTendrils);
        CHECK(p.sector_of(6) == Sector::OutTendrils);
        CHECK(p.sector_of(7) == Sector::Others);
        CHECK(p.sizes() == SectorSizes{2, 1, 1, 1, 1, 1, 1});
        CHECK(bowtie_sizes(g) == p.sizes());
    }
    SUBCASE("a cycle is all core") {
        auto g = DirectedGraph::from_pairs(4, Pairs{{0, 1}, {1, 2}, {2, 3}, {3, 0}});
        CHECK(bowtie_decompose(g).size(Sector::Scc) == 4);
    }
    SUBCASE("DAG path: the smallest id is the core") {
        auto g = DirectedGraph::from_pairs(3, Pairs{{0, 1}, {1, 2}});
        const auto p = bowtie_decompose(g);
        CHECK(p.sector_of(0) == Sector::Scc);
        CHECK(p.sector_of(1) == Sector::Out);
        CHECK(p.sector_of(2) == Sector::Out);
    }
    SUBCASE("equal-size cores: more internal edges wins") {
        // {0,1,2} is a plain cycle, {3,4,5} a cycle with a chord
        auto g = DirectedGraph::from_pairs(
            6, Pairs{{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}, {3, 5}, {2, 3}});
        const auto p = bowtie_decompose(g);
        CHECK(p.sector_of(3) == Sector::Scc);
        CHECK(p.sector_of(0) == Sector::In);
    }
    SUBCASE("reversal swaps IN/OUT and the tendrils") {
        std::mt19937_64 rng(17);
        for (int t = 0; t < 30; ++t) {
            auto g = fixtures::random_digraph(18, 0.08, rng);
            const auto a = bowtie_decompose(g);
            const auto b = bowtie_decompose(g.reversed());
            for (std::size_t v = 0; v < g.node_count(); ++v) {
                const auto s = a.sector_at(v);
                const auto r = b.sector_at(v);
                switch (s) {
                case Sector::In: CHECK(r == Sector::Out); break;
                case Sector::Out: CHECK(r == Sector::In); break;
                case Sector::InTendrils: CHECK(r == Sector::OutTendrils); break;
                case Sector::OutTendrils: CHECK(r == Sector::InTendrils); break;
                default: CHECK(r == s);
                }
            }
        }
    }
    SUBCASE("random graphs against the closure oracle") {
        std::mt19937_64 rng(23);
        for (int t = 0; t < 100; ++t) {
            const std::size_t n = 1 + t % 25;
            auto g = fixtures::random_digraph(n, 0.03 + 0.02 * (t % 7), rng);
            const auto expected = oracle::bowtie_by_closure(g);
            const auto p = bowtie_decompose(g);
            for (std::size_t v = 0; v < n; ++v)
                REQUIRE(p.sector_at(v) == expected[v]);
        }
    }
    SUBCASE("empty graph throws") {
        CHECK_THROWS_AS(bowtie_decompose(DirectedGraph{}), Error);
    }
}

TEST_CASE("induced_subgraph") {
    std::vector<WeightedEdge> e{{0, 1, 2}, {1, 2, 1}, {2, 0, 4}};
    DirectedGraph g({0, 1, 2, 3}, e);
    SUBCASE("keeps inner edges with weights") {
        std::vector<NodeId> keep{0, 1};
        auto s = induced_subgraph(g, keep);
        CHECK(s.node_count() == 2);
        CHECK(s.edge_count() == 1);
        CHECK(s.weight(0, 1) == 2);
    }
    SUBCASE("all nodes gives the same graph") {
        std::vector<NodeId> all{0, 1, 2, 3};
        CHECK(induced_subgraph(g, all) == g);
    }
    SUBCASE("empty selection") {
        CHECK(induced_subgraph(g, std::vector<NodeId>{}).empty());
    }
    SUBCASE("unknown node") {
        std::vector<NodeId> bad{7};
        CHECK_THROWS_AS(induced_subgraph(g, bad), Error);
    }
}

TEST_CASE("edge list round trip") {
    fixtures::ScratchDir dir("edges");
    std::vector<WeightedEdge> e{{3, 1, 2}, {1, 5, 1}};
    DirectedGraph g({1, 3, 5, 9}, e);
    write_edge_list(g, dir / "g.csv");
    std::vector<NodeId> extra{9};
    CHECK(read_edge_list(dir / "g.csv", numeric_id, extra) == g);
    write_partition(bowtie_decompose(g), dir / "p.csv");
    CHECK(fixtures::read_file(dir / "p.csv").rfind("node,sector\n", 0) == 0);
}
