#pragma once

// Shared test fixtures: scratch directories, small file writers and the
// planted two-community retweet corpus.

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "infoflow/digraph.hpp"

namespace fixtures {

namespace fs = std::filesystem;

/// A fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
public:
    explicit ScratchDir(const std::string& tag) {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("infoflow_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline fs::path write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    return path;
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Erdos-Renyi style digraph on ids 0..n-1 without self-loops.
inline infoflow::DirectedGraph random_digraph(std::size_t n, double p, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(p);
    std::vector<std::pair<infoflow::NodeId, infoflow::NodeId>> pairs;
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = 0; v < n; ++v)
            if (u != v && coin(rng))
                pairs.emplace_back(static_cast<infoflow::NodeId>(u), static_cast<infoflow::NodeId>(v));
    return infoflow::DirectedGraph::from_pairs(n, pairs);
}

inline infoflow::UndirectedGraph random_graph(std::size_t n, double p, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(p);
    std::vector<infoflow::NodeId> nodes(n);
    std::vector<infoflow::WeightedEdge> edges;
    for (std::size_t u = 0; u < n; ++u) {
        nodes[u] = static_cast<infoflow::NodeId>(u);
        for (std::size_t v = u + 1; v < n; ++v)
            if (coin(rng))
                edges.push_back({static_cast<infoflow::NodeId>(u), static_cast<infoflow::NodeId>(v), 1});
    }
    return infoflow::UndirectedGraph(nodes, edges);
}

/// Planted corpus.
///
/// Block A (the planted bow-tie): verified v0..v4 retweet each other in a
/// cycle (the core), every one of them is retweeted by each account of a
/// dedicated pool a0..a29, and second-hop accounts c0..c39 each retweet
/// one pool account. Everything outside the core is downstream of it, so the
/// community is a bow-tie with a small SCC and a large OUT sector.
///
/// Block B: verified w0..w4 and pool b0..b29, with retweets in both
/// directions so most of the block is one SCC.
///
/// The two blocks touch only through two unverified-to-unverified retweets.
/// Retweets from v0 carry an untrusted domain.
struct PlantedCorpus {
    fs::path accounts;
    fs::path retweets;
    fs::path ratings;

    static constexpr int kVerified = 5;
    static constexpr int kPool = 30;
    static constexpr int kSecondHop = 40;
};

inline PlantedCorpus write_planted_corpus(const fs::path& dir) {
    using C = PlantedCorpus;
    std::string accounts = "id,verified,screen_name\n";
    for (int i = 0; i < C::kVerified; ++i) {
        accounts += "v" + std::to_string(i) + ",true,news_" + std::to_string(i) + "\n";
        accounts += "w" + std::to_string(i) + ",true,party_" + std::to_string(i) + "\n";
    }
    for (int j = 0; j < C::kPool; ++j) {
        accounts += "a" + std::to_string(j) + ",false,\n";
        accounts += "b" + std::to_string(j) + ",false,\n";
    }
    for (int k = 0; k < C::kSecondHop; ++k)
        accounts += "c" + std::to_string(k) + ",false,\n";

    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> count(1, 3);
    std::string retweets = "author_id,retweeter_id,count,urls\n";
    auto add = [&](const std::string& author, const std::string& retweeter, const std::string& urls = "") {
        retweets += author + "," + retweeter + "," + std::to_string(count(rng)) + "," + urls + "\n";
    };
    const auto v = [](int i) { return "v" + std::to_string(i); };
    const auto w = [](int i) { return "w" + std::to_string(i); };
    const auto a = [](int i) { return "a" + std::to_string(i); };
    const auto b = [](int i) { return "b" + std::to_string(i); };
    const auto c = [](int i) { return "c" + std::to_string(i); };

    for (int i = 0; i < C::kVerified; ++i) {
        add(v(i), v((i + 1) % C::kVerified));
        add(v(i), v((i + 2) % C::kVerified));
    }
    for (int i = 0; i < C::kVerified; ++i)
        for (int j = 0; j < C::kPool; ++j)
            add(v(i), a(j), i == 0 ? "https://www.hoax.example/story|https://news.example.org/a" : "https://news.example.org/b");
    for (int k = 0; k < C::kSecondHop; ++k)
        add(a(k % C::kPool), c(k));

    for (int i = 0; i < C::kVerified; ++i)
        add(w(i), w((i + 1) % C::kVerified));
    for (int i = 0; i < C::kVerified; ++i)
        for (int j = 0; j < C::kPool; ++j) {
            add(w(i), b(j));
            if (j % C::kVerified == i)
                add(b(j), w(i));
        }

    add(b(0), a(0));
    add(b(1), a(1));

    PlantedCorpus out;
    out.accounts = write_file(dir / "accounts.csv", accounts);
    out.retweets = write_file(dir / "retweets.csv", retweets);
    out.ratings = write_file(dir / "ratings.csv", "domain,trusted\nhoax.example,false\nexample.org,true\n");
    return out;
}

}  // namespace fixtures
