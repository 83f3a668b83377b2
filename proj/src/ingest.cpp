#include "infoflow/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <set>

#include "infoflow/csv.hpp"

namespace infoflow {

std::optional<NodeId> AccountTable::find(std::string_view id) const {
    const auto it = index_.find(std::string(id));
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

NodeId AccountTable::at(std::string_view id) const {
    if (auto found = find(id))
        return *found;
    throw Error("unknown account id '" + std::string(id) + "'");
}

NodeId AccountTable::add(Account account) {
    const auto id = static_cast<NodeId>(accounts_.size());
    if (!index_.emplace(account.id, id).second)
        throw Error("duplicate account id '" + account.id + "'");
    accounts_.push_back(std::move(account));
    return id;
}

std::vector<NodeId> AccountTable::ids() const {
    std::vector<NodeId> out(accounts_.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<NodeId>(i);
    return out;
}

std::vector<NodeId> AccountTable::verified_ids() const {
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < accounts_.size(); ++i)
        if (accounts_[i].verified)
            out.push_back(static_cast<NodeId>(i));
    return out;
}

std::vector<std::string> RetweetRecord::urls() const {
    std::vector<std::string> out;
    for (const auto& batch : url_batches)
        out.insert(out.end(), batch.domains.begin(), batch.domains.end());
    return out;
}

AccountTable load_accounts(const std::filesystem::path& path) {
    CsvReader reader(path);
    AccountTable table;
    if (!reader.has_header())
        return table;
    const auto id_col = reader.require_column("id");
    const auto verified_col = reader.require_column("verified");
    const auto name_col = reader.column("screen_name");
    std::vector<std::string> f;
    while (reader.next(f)) {
        if (f[id_col].empty())
            reader.fail("empty account id");
        const auto verified = parse_bool(f[verified_col]);
        if (!verified)
            reader.fail("malformed verified flag '" + f[verified_col] + "'");
        if (table.find(f[id_col]))
            reader.fail("duplicate account id '" + f[id_col] + "'");
        table.add({f[id_col], *verified, name_col ? f[*name_col] : std::string()});
    }
    return table;
}

RetweetLoad load_retweets(const std::filesystem::path& path, AccountTable& accounts, UnknownIdPolicy policy) {
    CsvReader reader(path);
    RetweetLoad load;
    if (!reader.has_header())
        return load;
    const auto author_col = reader.require_column("author_id");
    const auto retweeter_col = reader.require_column("retweeter_id");
    const auto count_col = reader.column("count");
    const auto urls_col = reader.column("urls");

    const auto resolve = [&](const std::string& id) -> NodeId {
        if (id.empty())
            reader.fail("empty account id");
        if (auto found = accounts.find(id))
            return *found;
        if (policy == UnknownIdPolicy::Reject)
            reader.fail("unknown account id '" + id + "'");
        ++load.auto_registered;
        return accounts.add({id, false, {}});
    };

    std::map<EdgeKey, RetweetRecord> merged;
    std::vector<std::string> f;
    while (reader.next(f)) {
        ++load.rows;
        const NodeId author = resolve(f[author_col]);
        const NodeId retweeter = resolve(f[retweeter_col]);
        std::uint64_t count = 1;
        if (count_col && !f[*count_col].empty()) {
            const auto& c = f[*count_col];
            const auto res = std::from_chars(c.data(), c.data() + c.size(), count);
            if (res.ec != std::errc() || res.ptr != c.data() + c.size() || count == 0)
                reader.fail("count must be a positive integer, got '" + c + "'");
        }
        if (author == retweeter) {
            ++load.self_retweets_dropped;
            continue;
        }
        auto& record = merged[{author, retweeter}];
        record.author = author;
        record.retweeter = retweeter;
        record.count += count;
        if (urls_col && !f[*urls_col].empty()) {
            UrlBatch batch{count, {}};
            std::string_view rest = f[*urls_col];
            while (!rest.empty()) {
                const auto bar = rest.find('|');
                auto domain = normalize_domain(rest.substr(0, bar));
                if (!domain.empty())
                    batch.domains.push_back(std::move(domain));
                if (bar == std::string_view::npos)
                    break;
                rest.remove_prefix(bar + 1);
            }
            if (!batch.domains.empty())
                record.url_batches.push_back(std::move(batch));
        }
    }
    load.records.reserve(merged.size());
    for (auto& [key, record] : merged)
        load.records.push_back(std::move(record));
    return load;
}

RatingsTable load_ratings(const std::filesystem::path& path) {
    CsvReader reader(path);
    RatingsTable table;
    if (!reader.has_header())
        return table;
    const auto domain_col = reader.require_column("domain");
    const auto trusted_col = reader.require_column("trusted");
    std::vector<std::string> f;
    while (reader.next(f)) {
        const auto trusted = parse_bool(f[trusted_col]);
        if (!trusted)
            reader.fail("malformed trusted flag '" + f[trusted_col] + "'");
        auto domain = normalize_domain(f[domain_col]);
        if (domain.empty())
            reader.fail("empty domain");
        const auto [it, inserted] = table.emplace(domain, *trusted);
        if (!inserted && it->second != *trusted)
            reader.fail("conflicting ratings for domain '" + domain + "'");
    }
    return table;
}

namespace {

// Second-level labels under which registrations happen one level deeper,
// e.g. bbc.co.uk. Not a full public-suffix list.
constexpr std::array<std::string_view, 12> kSecondLevel = {
    "co", "com", "net", "org", "gov", "edu", "ac", "gob", "gouv", "ne", "or", "go",
};

bool is_ipv4(std::string_view host) {
    return !host.empty() && host.find_first_not_of("0123456789.") == std::string_view::npos;
}

}  // namespace

std::string normalize_domain(std::string_view url) {
    std::string s = to_lower(trim(url));
    if (const auto scheme = s.find("://"); scheme != std::string::npos)
        s.erase(0, scheme + 3);
    else if (s.rfind("//", 0) == 0)
        s.erase(0, 2);
    if (const auto end = s.find_first_of("/?#"); end != std::string::npos)
        s.erase(end);
    if (const auto at = s.rfind('@'); at != std::string::npos)
        s.erase(0, at + 1);
    if (const auto colon = s.find(':'); colon != std::string::npos)
        s.erase(colon);
    while (!s.empty() && s.back() == '.')
        s.pop_back();
    if (s.rfind("www.", 0) == 0)
        s.erase(0, 4);
    if (s.empty() || is_ipv4(s))
        return s;

    std::vector<std::string_view> labels;
    std::string_view rest = s;
    while (true) {
        const auto dot = rest.find('.');
        labels.push_back(rest.substr(0, dot));
        if (dot == std::string_view::npos)
            break;
        rest.remove_prefix(dot + 1);
    }
    std::size_t keep = 2;
    if (labels.size() >= 3 && labels.back().size() == 2 &&
        std::find(kSecondLevel.begin(), kSecondLevel.end(), labels[labels.size() - 2]) != kSecondLevel.end())
        keep = 3;
    if (labels.size() <= keep)
        return s;
    std::string out;
    for (std::size_t i = labels.size() - keep; i < labels.size(); ++i) {
        if (!out.empty())
            out.push_back('.');
        out.append(labels[i]);
    }
    return out;
}

std::size_t BipartiteGraph::edge_count() const {
    std::size_t e = 0;
    for (const auto& row : top_adj)
        e += row.size();
    return e;
}

bool BipartiteGraph::linked(std::size_t i, std::size_t a) const {
    const auto& row = top_adj[i];
    return std::binary_search(row.begin(), row.end(), static_cast<std::uint32_t>(a));
}

BipartiteGraph bipartite_from_edges(std::span<const std::pair<NodeId, NodeId>> verified_unverified) {
    std::set<std::pair<NodeId, NodeId>> links(verified_unverified.begin(), verified_unverified.end());
    BipartiteGraph g;
    for (const auto& [v, u] : links) {
        g.top.push_back(v);
        g.bottom.push_back(u);
    }
    for (auto* layer : {&g.top, &g.bottom}) {
        std::sort(layer->begin(), layer->end());
        layer->erase(std::unique(layer->begin(), layer->end()), layer->end());
    }
    for (NodeId v : g.top)
        if (std::binary_search(g.bottom.begin(), g.bottom.end(), v))
            throw Error("account " + std::to_string(v) + " appears in both bipartite layers");
    g.top_adj.resize(g.top.size());
    g.bottom_adj.resize(g.bottom.size());
    const auto pos = [](const std::vector<NodeId>& layer, NodeId id) {
        return static_cast<std::uint32_t>(std::lower_bound(layer.begin(), layer.end(), id) - layer.begin());
    };
    // `links` is ordered by (top, bottom), so rows come out sorted; the
    // bottom side is sorted afterwards.
    for (const auto& [v, u] : links) {
        const auto i = pos(g.top, v);
        const auto a = pos(g.bottom, u);
        g.top_adj[i].push_back(a);
        g.bottom_adj[a].push_back(i);
    }
    for (auto& col : g.bottom_adj)
        std::sort(col.begin(), col.end());
    return g;
}

BipartiteGraph build_bipartite(const std::vector<RetweetRecord>& records, const AccountTable& accounts) {
    std::vector<std::pair<NodeId, NodeId>> links;
    for (const auto& r : records) {
        const bool a = accounts[r.author].verified;
        const bool b = accounts[r.retweeter].verified;
        if (a == b)
            continue;
        links.emplace_back(a ? r.author : r.retweeter, a ? r.retweeter : r.author);
    }
    return bipartite_from_edges(links);
}

DirectedGraph build_retweet_digraph(const std::vector<RetweetRecord>& records, const AccountTable& accounts) {
    std::vector<WeightedEdge> edges;
    edges.reserve(records.size());
    for (const auto& r : records)
        edges.push_back({r.author, r.retweeter, r.count});
    return DirectedGraph(accounts.ids(), edges);
}

UrlAnnotations annotate_urls(const std::vector<RetweetRecord>& records, const RatingsTable& ratings) {
    UrlAnnotations out;
    for (const auto& r : records) {
        UrlCounts counts;
        for (const auto& batch : r.url_batches) {
            std::uint64_t untrusted = 0;
            for (const auto& domain : batch.domains) {
                const auto it = ratings.find(domain);
                if (it != ratings.end() && !it->second)
                    ++untrusted;
            }
            counts.total_urls += batch.count * batch.domains.size();
            counts.untrusted_urls += batch.count * untrusted;
            if (untrusted > 0)
                counts.untrusted_retweets += batch.count;
        }
        out[{r.author, r.retweeter}] = counts;
    }
    return out;
}

}  // namespace infoflow
