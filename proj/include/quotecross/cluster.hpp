#pragma once

#include <optional>
#include <string>
#include <vector>

#include "quotecross/date.hpp"
#include "quotecross/geo.hpp"

namespace quotecross {

enum class MatchKind { None, Loose, Exact };

std::string_view match_kind_name(MatchKind kind);

struct OfflineOccurrence {
    std::string event_id;
    Date date{};
    std::optional<GeoPoint> geo;
};

struct OnlineMention {
    std::string post_id;
    Date date{};
    std::string platform;
    MatchKind kind = MatchKind::None;
};

// Equivalence class of matching quote occurrences. Members share one
// loose key; manual merges can fold several keys into one cluster, so
// all member keys are kept alongside the canonical one.
struct QuoteCluster {
    std::string cluster_id;
    std::string canonical;                 // loose key of the dominant variant group
    std::vector<std::string> loose_keys;   // every member loose key (>=1)
    std::vector<std::string> variants;     // distinct raw texts, sorted
    std::vector<OfflineOccurrence> offline_occurrences;
    std::vector<OnlineMention> online_mentions;

    std::size_t offline_count() const { return offline_occurrences.size(); }
    std::size_t online_count() const { return online_mentions.size(); }
};

}  // namespace quotecross
