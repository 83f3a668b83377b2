#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "infoflow/digraph.hpp"

namespace infoflow {

struct Account {
    std::string id;
    bool verified = false;
    std::string screen_name;
};

/// Accounts indexed by NodeId (insertion order).
class AccountTable {
public:
    std::size_t size() const noexcept { return accounts_.size(); }
    bool empty() const noexcept { return accounts_.empty(); }

    const Account& operator[](NodeId id) const { return accounts_.at(id); }
    std::optional<NodeId> find(std::string_view id) const;
    /// Throws Error when `id` is unknown.
    NodeId at(std::string_view id) const;

    /// Throws Error on a duplicate id.
    NodeId add(Account account);

    std::vector<NodeId> ids() const;
    std::vector<NodeId> verified_ids() const;

    auto begin() const noexcept { return accounts_.begin(); }
    auto end() const noexcept { return accounts_.end(); }

private:
    std::vector<Account> accounts_;
    std::unordered_map<std::string, NodeId> index_;
};

/// URLs carried by `count` identical retweets.
struct UrlBatch {
    std::uint64_t count = 1;
    std::vector<std::string> domains;
};

/// All retweets of `author` by `retweeter`.
struct RetweetRecord {
    NodeId author = 0;
    NodeId retweeter = 0;
    std::uint64_t count = 0;
    /// One entry per input row that carried URLs.
    std::vector<UrlBatch> url_batches;

    /// Every domain, in input order.
    std::vector<std::string> urls() const;
};

enum class UnknownIdPolicy { AutoRegister, Reject };

struct RetweetLoad {
    std::vector<RetweetRecord> records;  // sorted by (author, retweeter)
    std::size_t rows = 0;
    std::size_t self_retweets_dropped = 0;
    std::size_t auto_registered = 0;
};

/// Domain -> trusted.
using RatingsTable = std::map<std::string, bool>;

/// Header "id,verified,screen_name". Throws ParseError on malformed rows or
/// duplicate ids.
AccountTable load_accounts(const std::filesystem::path& path);

/// Header "author_id,retweeter_id[,count][,urls]"; urls are '|'-separated.
/// Rows are aggregated per (author, retweeter); self-retweets are dropped
/// and counted. Unknown ids are registered as non-verified, or rejected in
/// Reject mode.
RetweetLoad load_retweets(const std::filesystem::path& path, AccountTable& accounts,
                          UnknownIdPolicy policy = UnknownIdPolicy::AutoRegister);

/// Header "domain,trusted". Throws ParseError on malformed flags or
/// conflicting duplicates.
RatingsTable load_ratings(const std::filesystem::path& path);

/// Lowercase, drop scheme, credentials, path, port and a leading "www.",
/// then reduce to the registrable domain. Returns "" when nothing is left.
std::string normalize_domain(std::string_view url);

/// Bipartite verified x unverified interaction matrix. Both layers contain
/// only accounts with at least one cross-layer retweet.
struct BipartiteGraph {
    std::vector<NodeId> top;       // verified, ascending
    std::vector<NodeId> bottom;    // unverified, ascending
    std::vector<std::vector<std::uint32_t>> top_adj;     // bottom indices, ascending
    std::vector<std::vector<std::uint32_t>> bottom_adj;  // top indices, ascending

    std::size_t edge_count() const;
    bool linked(std::size_t i, std::size_t a) const;
};

/// m_{ia} = 1 iff verified i and unverified a retweeted each other at least
/// once in either direction.
BipartiteGraph build_bipartite(const std::vector<RetweetRecord>& records, const AccountTable& accounts);
BipartiteGraph bipartite_from_edges(std::span<const std::pair<NodeId, NodeId>> verified_unverified);

/// Edge author -> retweeter weighted by retweet count, over every account.
DirectedGraph build_retweet_digraph(const std::vector<RetweetRecord>& records, const AccountTable& accounts);

struct UrlCounts {
    std::uint64_t total_urls = 0;
    std::uint64_t untrusted_urls = 0;
    /// Retweets carrying at least one untrusted domain.
    std::uint64_t untrusted_retweets = 0;
};

using EdgeKey = std::pair<NodeId, NodeId>;
using UrlAnnotations = std::map<EdgeKey, UrlCounts>;

/// Per (author, retweeter) counts. Domains missing from `ratings` are
/// unrated and never count as untrusted.
UrlAnnotations annotate_urls(const std::vector<RetweetRecord>& records, const RatingsTable& ratings);

}  // namespace infoflow
