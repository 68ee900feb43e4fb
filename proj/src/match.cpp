#include "quotecross/match.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "quotecross/csv.hpp"
#include "quotecross/errors.hpp"

namespace quotecross {

namespace {

std::string padded_id(char prefix, std::size_t n) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%c%05zu", prefix, n);
    return buf;
}

void sort_clusters(std::vector<QuoteCluster>& clusters) {
    std::stable_sort(clusters.begin(), clusters.end(),
                     [](const QuoteCluster& a, const QuoteCluster& b) {
                         const std::size_t na = a.offline_count() + a.online_count();
                         const std::size_t nb = b.offline_count() + b.online_count();
                         if (na != nb) return na > nb;
                         return a.canonical < b.canonical;
                     });
}

// Wraps a key in sentinel spaces so that substring search on the joined
// token stream is exactly contiguous-subsequence search on tokens.
std::string sentinel(const std::string& key) {
    std::string out;
    out.reserve(key.size() + 2);
    out.push_back(' ');
    out += key;
    out.push_back(' ');
    return out;
}

}  // namespace

std::string_view match_kind_name(MatchKind kind) {
    switch (kind) {
        case MatchKind::Exact: return "exact";
        case MatchKind::Loose: return "loose";
        case MatchKind::None: return "none";
    }
    return "none";
}

MatchKind match_pair(const NormalForm& a, const NormalForm& b) {
    if (a.loose_key.empty() || b.loose_key.empty()) return MatchKind::None;
    if (a.exact_key == b.exact_key) return MatchKind::Exact;
    if (a.loose_key == b.loose_key) return MatchKind::Loose;
    return MatchKind::None;
}

ClusterResult cluster_quotes(const std::vector<OfflineEvent>& events,
                             const Normalizer& normalizer) {
    ClusterResult result;
    std::unordered_map<std::string, std::size_t> index;  // loose key -> cluster slot
    std::vector<std::set<std::string>> variant_sets;

    for (const OfflineEvent& ev : events) {
        const NormalForm form = normalizer.normalize(ev.quote_raw);
        if (form.unmatchable()) {
            result.rejected.push_back({ev.id, ev.quote_raw});
            continue;
        }
        auto [it, inserted] = index.emplace(form.loose_key, result.clusters.size());
        if (inserted) {
            QuoteCluster cluster;
            cluster.canonical = form.loose_key;
            cluster.loose_keys = {form.loose_key};
            result.clusters.push_back(std::move(cluster));
            variant_sets.emplace_back();
        }
        QuoteCluster& cluster = result.clusters[it->second];
        variant_sets[it->second].insert(ev.quote_raw);
        cluster.offline_occurrences.push_back({ev.id, ev.date, ev.geo});
    }

    for (std::size_t i = 0; i < result.clusters.size(); ++i) {
        result.clusters[i].variants.assign(variant_sets[i].begin(), variant_sets[i].end());
    }
    sort_clusters(result.clusters);
    for (std::size_t i = 0; i < result.clusters.size(); ++i) {
        result.clusters[i].cluster_id = padded_id('c', i + 1);
    }
    return result;
}

ClusterResult cluster_online(const std::vector<OnlinePost>& posts,
                             const Normalizer& normalizer) {
    ClusterResult result;
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::set<std::string>> variant_sets;
    std::vector<std::string> first_exact_key;  // exact key of each cluster's first member

    for (const OnlinePost& post : posts) {
        const NormalForm form = normalizer.normalize(post.text);
        if (form.unmatchable()) {
            result.rejected.push_back({post.id, post.text});
            continue;
        }
        auto [it, inserted] = index.emplace(form.loose_key, result.clusters.size());
        if (inserted) {
            QuoteCluster cluster;
            cluster.canonical = form.loose_key;
            cluster.loose_keys = {form.loose_key};
            result.clusters.push_back(std::move(cluster));
            variant_sets.emplace_back();
            first_exact_key.push_back(form.exact_key);
        }
        QuoteCluster& cluster = result.clusters[it->second];
        variant_sets[it->second].insert(post.text);
        const MatchKind kind = form.exact_key == first_exact_key[it->second]
                                   ? MatchKind::Exact
                                   : MatchKind::Loose;
        cluster.online_mentions.push_back({post.id, post.day, post.platform, kind});
    }

    for (std::size_t i = 0; i < result.clusters.size(); ++i) {
        result.clusters[i].variants.assign(variant_sets[i].begin(), variant_sets[i].end());
    }
    sort_clusters(result.clusters);
    for (std::size_t i = 0; i < result.clusters.size(); ++i) {
        result.clusters[i].cluster_id = padded_id('o', i + 1);
    }
    return result;
}

std::vector<std::pair<std::string, std::string>> load_merge_pairs(
    const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FatalError("cannot open merge file: " + path.string());
    CsvReader reader(in);
    std::size_t line = 0;
    auto header = reader.next(line);
    if (!header) return {};
    auto find_col = [&](std::string_view name) -> std::size_t {
        auto it = std::find(header->begin(), header->end(), name);
        if (it == header->end()) {
            throw FatalError("merge file missing column '" + std::string(name) + "': " +
                             path.string());
        }
        return static_cast<std::size_t>(it - header->begin());
    };
    const std::size_t a = find_col("cluster_a");
    const std::size_t b = find_col("cluster_b");

    std::vector<std::pair<std::string, std::string>> pairs;
    while (auto row = reader.next(line)) {
        if (row->size() == 1 && (*row)[0].empty()) continue;
        if (row->size() != header->size()) {
            throw FatalError(path.string() + ":" + std::to_string(line) +
                             ": malformed merge row");
        }
        pairs.emplace_back((*row)[a], (*row)[b]);
    }
    return pairs;
}

std::vector<QuoteCluster> apply_manual_merges(
    std::vector<QuoteCluster> clusters,
    const std::vector<std::pair<std::string, std::string>>& pairs,
    Diagnostics& diagnostics) {
    if (pairs.empty()) return clusters;

    std::unordered_map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        by_id.emplace(clusters[i].cluster_id, i);
    }

    std::vector<std::size_t> parent(clusters.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };

    for (const auto& [ida, idb] : pairs) {
        auto ita = by_id.find(ida);
        auto itb = by_id.find(idb);
        if (ita == by_id.end() || itb == by_id.end()) {
            diagnostics.push_back({"merges", 0,
                                   "unknown cluster id in merge pair (" + ida + ", " + idb +
                                       "); pair ignored"});
            continue;
        }
        const std::size_t ra = find(ita->second);
        const std::size_t rb = find(itb->second);
        if (ra != rb) parent[ra] = rb;
    }

    // Gather members per group, ordered by cluster id.
    std::map<std::string, std::vector<std::size_t>> groups;  // smallest id -> members
    std::unordered_map<std::size_t, std::string> group_key;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        const std::size_t root = find(i);
        auto it = group_key.find(root);
        if (it == group_key.end()) {
            group_key.emplace(root, clusters[i].cluster_id);
            groups[clusters[i].cluster_id].push_back(i);
        } else {
            if (clusters[i].cluster_id < it->second) {
                auto node = groups.extract(it->second);
                node.key() = clusters[i].cluster_id;
                groups.insert(std::move(node));
                it->second = clusters[i].cluster_id;
            }
            groups[it->second].push_back(i);
        }
    }

    std::vector<QuoteCluster> merged;
    merged.reserve(groups.size());
    for (auto& [id, members] : groups) {
        std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
            return clusters[a].cluster_id < clusters[b].cluster_id;
        });
        if (members.size() == 1) {
            merged.push_back(std::move(clusters[members[0]]));
            continue;
        }
        QuoteCluster out;
        out.cluster_id = id;
        std::set<std::string> keys;
        std::set<std::string> variants;
        const QuoteCluster* dominant = nullptr;
        for (std::size_t m : members) {
            const QuoteCluster& c = clusters[m];
            keys.insert(c.loose_keys.begin(), c.loose_keys.end());
            variants.insert(c.variants.begin(), c.variants.end());
            out.offline_occurrences.insert(out.offline_occurrences.end(),
                                           c.offline_occurrences.begin(),
                                           c.offline_occurrences.end());
            out.online_mentions.insert(out.online_mentions.end(), c.online_mentions.begin(),
                                       c.online_mentions.end());
            const std::size_t size = c.offline_count() + c.online_count();
            if (!dominant ||
                size > dominant->offline_count() + dominant->online_count() ||
                (size == dominant->offline_count() + dominant->online_count() &&
                 c.canonical < dominant->canonical)) {
                dominant = &c;
            }
        }
        out.canonical = dominant->canonical;
        out.loose_keys.assign(keys.begin(), keys.end());
        out.variants.assign(variants.begin(), variants.end());
        merged.push_back(std::move(out));
    }
    sort_clusters(merged);
    return merged;
}

MentionScanner::MentionScanner(const std::vector<QuoteCluster>& clusters,
                               const Normalizer& normalizer)
    : normalizer_(normalizer) {
    for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
        const auto id = static_cast<std::int32_t>(ci);
        std::unordered_set<std::string> exact_keys;
        for (const std::string& variant : clusters[ci].variants) {
            const NormalForm form = normalizer_.normalize(variant);
            if (!form.exact_key.empty() && exact_keys.insert(form.exact_key).second) {
                exact_.add(sentinel(form.exact_key), id);
            }
        }
        for (const std::string& key : clusters[ci].loose_keys) {
            if (!key.empty()) loose_.add(sentinel(key), id);
        }
    }
    exact_.build();
    loose_.build();
}

void MentionScanner::scan(const NormalForm& form, std::vector<Match>& out) const {
    out.clear();
    if (!form.exact_key.empty()) {
        exact_.scan(sentinel(form.exact_key),
                    [&](std::int32_t id) { out.push_back({id, MatchKind::Exact}); });
    }
    if (!form.loose_key.empty()) {
        loose_.scan(sentinel(form.loose_key),
                    [&](std::int32_t id) { out.push_back({id, MatchKind::Loose}); });
    }
    // One entry per cluster; Exact wins.
    std::sort(out.begin(), out.end(), [](const Match& a, const Match& b) {
        if (a.cluster_index != b.cluster_index) return a.cluster_index < b.cluster_index;
        return a.kind == MatchKind::Exact && b.kind != MatchKind::Exact;
    });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const Match& a, const Match& b) {
                              return a.cluster_index == b.cluster_index;
                          }),
              out.end());
}

void MentionScanner::scan_text(std::string_view text, std::vector<Match>& out) const {
    scan(normalizer_.normalize(text), out);
}

MentionStats find_online_mentions(std::vector<QuoteCluster>& clusters,
                                  const std::vector<OnlinePost>& posts,
                                  const Normalizer& normalizer, unsigned threads) {
    const MentionScanner scanner(clusters, normalizer);

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t chunk_size =
        std::max<std::size_t>(1024, (posts.size() + threads - 1) / threads);
    const std::size_t n_chunks = posts.empty() ? 0 : (posts.size() + chunk_size - 1) / chunk_size;

    struct PairHit {
        std::size_t post;
        std::int32_t cluster;
        MatchKind kind;
    };
    std::vector<std::vector<PairHit>> chunk_hits(n_chunks);

    auto scan_chunk = [&](std::size_t chunk) {
        const std::size_t begin = chunk * chunk_size;
        const std::size_t end = std::min(posts.size(), begin + chunk_size);
        std::vector<MentionScanner::Match> matches;
        auto& hits = chunk_hits[chunk];
        for (std::size_t i = begin; i < end; ++i) {
            scanner.scan(normalizer.normalize(posts[i].text), matches);
            for (const auto& m : matches) {
                hits.push_back({i, m.cluster_index, m.kind});
            }
        }
    };

    if (threads <= 1 || n_chunks <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) scan_chunk(c);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const unsigned n_workers = std::min<std::size_t>(threads, n_chunks);
        pool.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w) {
            pool.emplace_back([&] {
                while (true) {
                    const std::size_t c = next.fetch_add(1);
                    if (c >= n_chunks) return;
                    scan_chunk(c);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    MentionStats stats;
    for (std::size_t c = 0; c < n_chunks; ++c) {
        std::size_t i = 0;
        const auto& hits = chunk_hits[c];
        while (i < hits.size()) {
            std::size_t j = i;
            bool any_exact = false;
            while (j < hits.size() && hits[j].post == hits[i].post) {
                const PairHit& hit = hits[j];
                const OnlinePost& post = posts[hit.post];
                clusters[static_cast<std::size_t>(hit.cluster)].online_mentions.push_back(
                    {post.id, post.day, post.platform, hit.kind});
                ++stats.mention_pairs;
                if (hit.kind == MatchKind::Exact) {
                    ++stats.exact_pairs;
                    any_exact = true;
                } else {
                    ++stats.loose_pairs;
                }
                ++j;
            }
            if (any_exact) {
                ++stats.exact_posts;
            } else {
                ++stats.loose_only_posts;
            }
            i = j;
        }
    }
    stats.total_posts = stats.exact_posts + stats.loose_only_posts;
    return stats;
}

}  // namespace quotecross
