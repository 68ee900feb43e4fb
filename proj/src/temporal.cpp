#include "quotecross/temporal.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "quotecross/errors.hpp"

namespace quotecross {

std::string_view direction_name(Direction d) {
    switch (d) {
        case Direction::OnlineFirst: return "online_first";
        case Direction::OfflineFirst: return "offline_first";
        case Direction::SameDay: return "same_day";
        case Direction::OfflineOnly: return "offline_only";
        case Direction::OnlineOnly: return "online_only";
    }
    return "offline_only";
}

std::optional<Direction> parse_direction(std::string_view s) {
    if (s == "online_first") return Direction::OnlineFirst;
    if (s == "offline_first") return Direction::OfflineFirst;
    if (s == "same_day") return Direction::SameDay;
    if (s == "offline_only") return Direction::OfflineOnly;
    if (s == "online_only") return Direction::OnlineOnly;
    return std::nullopt;
}

long long lifespan(const QuoteCluster& cluster) {
    assert(!cluster.offline_occurrences.empty());
    Date first = cluster.offline_occurrences.front().date;
    Date last = first;
    for (const auto& occ : cluster.offline_occurrences) {
        first = std::min(first, occ.date);
        last = std::max(last, occ.date);
    }
    return days_between(first, last);
}

std::vector<QuoteCluster> restrict_window(const std::vector<QuoteCluster>& clusters,
                                          Date start, Date end) {
    if (start > end) {
        throw ConfigError("analysis window is inverted: start " + format_date(start) +
                          " is after end " + format_date(end));
    }
    std::vector<QuoteCluster> out;
    out.reserve(clusters.size());
    for (const QuoteCluster& c : clusters) {
        QuoteCluster kept = c;
        kept.offline_occurrences.clear();
        kept.online_mentions.clear();
        for (const auto& occ : c.offline_occurrences) {
            if (occ.date >= start && occ.date <= end) kept.offline_occurrences.push_back(occ);
        }
        for (const auto& m : c.online_mentions) {
            if (m.date >= start && m.date <= end) kept.online_mentions.push_back(m);
        }
        if (!kept.offline_occurrences.empty() || !kept.online_mentions.empty()) {
            out.push_back(std::move(kept));
        }
    }
    return out;
}

CrossoverRecord lead_lag(const QuoteCluster& cluster) {
    CrossoverRecord rec;
    rec.cluster_id = cluster.cluster_id;
    for (const auto& occ : cluster.offline_occurrences) {
        if (!rec.first_offline || occ.date < *rec.first_offline) rec.first_offline = occ.date;
    }
    for (const auto& m : cluster.online_mentions) {
        if (!rec.first_online || m.date < *rec.first_online) rec.first_online = m.date;
    }
    if (rec.first_offline && rec.first_online) {
        long long gap = days_between(*rec.first_online, *rec.first_offline);
        if (gap > 0) {
            rec.direction = Direction::OnlineFirst;
            rec.gap_days = gap;
        } else if (gap < 0) {
            rec.direction = Direction::OfflineFirst;
            rec.gap_days = -gap;
        } else {
            rec.direction = Direction::SameDay;
            rec.gap_days = 0;
        }
    } else if (rec.first_offline) {
        rec.direction = Direction::OfflineOnly;
    } else if (rec.first_online) {
        rec.direction = Direction::OnlineOnly;
    } else {
        rec.direction = Direction::OfflineOnly;  // empty cluster; callers filter these
    }
    return rec;
}

namespace {

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};

MeanSd mean_population_sd(const std::vector<double>& xs) {
    MeanSd out;
    const double n = static_cast<double>(xs.size());
    for (double x : xs) out.mean += x;
    out.mean /= n;
    double ss = 0.0;
    for (double x : xs) {
        const double d = x - out.mean;
        ss += d * d;
    }
    out.sd = std::sqrt(ss / n);
    return out;
}

}  // namespace

CrossoverStats crossover_stats(std::span<const CrossoverRecord> records,
                               std::optional<Date> window_start,
                               std::optional<Date> window_end) {
    CrossoverStats stats;
    stats.window_start = window_start;
    stats.window_end = window_end;
    std::vector<double> online_gaps;
    std::vector<double> offline_gaps;
    for (const CrossoverRecord& r : records) {
        switch (r.direction) {
            case Direction::OnlineFirst:
                ++stats.n_both;
                ++stats.n_online_first;
                online_gaps.push_back(static_cast<double>(r.gap_days.value()));
                break;
            case Direction::OfflineFirst:
                ++stats.n_both;
                ++stats.n_offline_first;
                offline_gaps.push_back(static_cast<double>(r.gap_days.value()));
                break;
            case Direction::SameDay:
                ++stats.n_both;
                ++stats.n_same_day;
                break;
            case Direction::OfflineOnly:
            case Direction::OnlineOnly:
                break;
        }
    }
    const std::size_t directional = stats.n_online_first + stats.n_offline_first;
    if (directional > 0) {
        stats.pct_online_first =
            static_cast<double>(stats.n_online_first) / static_cast<double>(directional);
    }
    if (!online_gaps.empty()) {
        MeanSd ms = mean_population_sd(online_gaps);
        stats.mean_gap_online_first = ms.mean;
        stats.sd_gap_online_first = ms.sd;
    }
    if (!offline_gaps.empty()) {
        MeanSd ms = mean_population_sd(offline_gaps);
        stats.mean_gap_offline_first = ms.mean;
        stats.sd_gap_offline_first = ms.sd;
    }
    return stats;
}

double quantile_linear(std::span<const double> values, double p) {
    assert(!values.empty());
    assert(p >= 0.0 && p <= 1.0);
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.size() == 1) return sorted[0];
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::string_view region_name(Region r) {
    switch (r) {
        case Region::A: return "A";
        case Region::B: return "B";
        case Region::C: return "C";
        case Region::Other: return "other";
    }
    return "other";
}

RegionClassification classify_regions(std::span<const double> radii,
                                      std::span<const double> lifespans,
                                      double radius_quantile, double lifespan_quantile) {
    assert(radii.size() == lifespans.size());
    RegionClassification out;
    out.thresholds.radius_quantile = radius_quantile;
    out.thresholds.lifespan_quantile = lifespan_quantile;
    if (radii.size() < 4) {
        out.labels.assign(radii.size(), Region::Other);
        out.warning = "fewer than 4 clusters: region thresholds undefined, all labeled other";
        return out;
    }
    out.thresholds.defined = true;
    out.thresholds.radius = quantile_linear(radii, radius_quantile);
    out.thresholds.lifespan = quantile_linear(lifespans, lifespan_quantile);
    out.labels.reserve(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const bool wide = radii[i] >= out.thresholds.radius;
        const bool lasting = lifespans[i] >= out.thresholds.lifespan;
        out.labels.push_back(wide ? (lasting ? Region::A : Region::B)
                                  : (lasting ? Region::C : Region::Other));
    }
    return out;
}

}  // namespace quotecross
