#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "quotecross/aho_corasick.hpp"
#include "quotecross/cluster.hpp"
#include "quotecross/corpus.hpp"
#include "quotecross/diagnostics.hpp"
#include "quotecross/normalize.hpp"

namespace quotecross {

// Two-step comparison: Exact when the folded token streams are equal,
// otherwise Loose when the punctuation- and stopword-free keys are equal.
// Symmetric. Unmatchable texts (empty loose form) match nothing, not even
// themselves, mirroring their rejection from clustering.
MatchKind match_pair(const NormalForm& a, const NormalForm& b);

// A quote or post whose loose form is empty and therefore cannot match.
struct RejectedText {
    std::string id;
    std::string text;
};

struct ClusterResult {
    std::vector<QuoteCluster> clusters;  // count desc, canonical asc; ids assigned
    std::vector<RejectedText> rejected;
};

// Partitions events by loose key, which equals the transitive closure of
// pairwise match_pair over all pairs. Ids are c<n> in sorted order.
ClusterResult cluster_quotes(const std::vector<OfflineEvent>& events,
                             const Normalizer& normalizer);

// Same partition over whole post texts; members are recorded as
// online_mentions (kind Exact when a member shares the exact key of the
// cluster's first member). Ids are o<n>.
ClusterResult cluster_online(const std::vector<OnlinePost>& posts,
                             const Normalizer& normalizer);

// Manual merge list: CSV with columns cluster_a,cluster_b. Pairs whose
// ids are not found in the target list are reported and ignored.
std::vector<std::pair<std::string, std::string>> load_merge_pairs(
    const std::filesystem::path& path);

std::vector<QuoteCluster> apply_manual_merges(
    std::vector<QuoteCluster> clusters,
    const std::vector<std::pair<std::string, std::string>>& pairs,
    Diagnostics& diagnostics);

struct MentionStats {
    std::size_t exact_posts = 0;       // posts with at least one exact mention
    std::size_t loose_only_posts = 0;  // posts found only by the loose tier
    std::size_t total_posts = 0;       // exact_posts + loose_only_posts
    std::size_t mention_pairs = 0;     // (cluster, post) pairs recorded
    std::size_t exact_pairs = 0;
    std::size_t loose_pairs = 0;
};

// Multi-pattern containment scanner over both tiers. A post mentions a
// cluster when one of the cluster's exact variant token sequences occurs
// contiguously in the post's exact tokens (Exact), or a member loose key
// occurs contiguously in the post's loose tokens (Loose). Result-identical
// to scanning each pattern independently.
class MentionScanner {
  public:
    MentionScanner(const std::vector<QuoteCluster>& clusters, const Normalizer& normalizer);

    struct Match {
        std::int32_t cluster_index;
        MatchKind kind;
    };

    // Matches for one post body, sorted by cluster index, one entry per
    // cluster (Exact wins over Loose). Thread-safe.
    void scan(const NormalForm& form, std::vector<Match>& out) const;
    void scan_text(std::string_view text, std::vector<Match>& out) const;

    std::size_t exact_pattern_count() const { return exact_.pattern_count(); }
    std::size_t loose_pattern_count() const { return loose_.pattern_count(); }

  private:
    const Normalizer& normalizer_;
    AhoCorasick exact_;
    AhoCorasick loose_;
};

// Records every (cluster, post) mention pair into the clusters, in post
// order, and returns the per-post tier counts. Scanning partitions posts
// across `threads` workers (0 = hardware concurrency); results are merged
// in post order, so the output is independent of the thread count.
MentionStats find_online_mentions(std::vector<QuoteCluster>& clusters,
                                  const std::vector<OnlinePost>& posts,
                                  const Normalizer& normalizer, unsigned threads = 0);

}  // namespace quotecross
