#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quotecross/cluster.hpp"
#include "quotecross/date.hpp"

namespace quotecross {

enum class Direction { OnlineFirst, OfflineFirst, SameDay, OfflineOnly, OnlineOnly };

std::string_view direction_name(Direction d);
std::optional<Direction> parse_direction(std::string_view s);

// Per-cluster first-appearance comparison between media. gap_days is
// present iff both first dates are; it is the absolute day difference
// (0 for SameDay).
struct CrossoverRecord {
    std::string cluster_id;
    std::optional<Date> first_offline;
    std::optional<Date> first_online;
    Direction direction = Direction::OfflineOnly;
    std::optional<long long> gap_days;
};

struct CrossoverStats {
    std::size_t n_both = 0;  // clusters with both media present (incl. SameDay)
    std::size_t n_online_first = 0;
    std::size_t n_offline_first = 0;
    std::size_t n_same_day = 0;
    // OnlineFirst / (OnlineFirst + OfflineFirst); absent when no
    // directional records exist. SameDay stays out of both buckets.
    std::optional<double> pct_online_first;
    std::optional<double> mean_gap_online_first;
    std::optional<double> sd_gap_online_first;  // population SD
    std::optional<double> mean_gap_offline_first;
    std::optional<double> sd_gap_offline_first;
    std::optional<Date> window_start;
    std::optional<Date> window_end;
};

// Days from first to last offline occurrence (0 for a single event).
// Requires at least one offline occurrence.
long long lifespan(const QuoteCluster& cluster);

// Copies clusters keeping only activity within [start, end]; clusters
// left empty in both media are dropped. Inverted windows are a
// configuration error.
std::vector<QuoteCluster> restrict_window(const std::vector<QuoteCluster>& clusters,
                                          Date start, Date end);

CrossoverRecord lead_lag(const QuoteCluster& cluster);

CrossoverStats crossover_stats(std::span<const CrossoverRecord> records,
                               std::optional<Date> window_start = std::nullopt,
                               std::optional<Date> window_end = std::nullopt);

// Linear-interpolation quantile of the values (the numpy default):
// rank h = (n-1)*p between sorted order statistics. Requires nonempty
// input and p in [0,1].
double quantile_linear(std::span<const double> values, double p);

enum class Region { A, B, C, Other };

std::string_view region_name(Region r);

struct RegionThresholds {
    bool defined = false;
    double radius = 0.0;
    double lifespan = 0.0;
    double radius_quantile = 0.75;
    double lifespan_quantile = 0.75;
};

struct RegionClassification {
    RegionThresholds thresholds;
    std::vector<Region> labels;  // parallel to the input order
    std::optional<std::string> warning;
};

// A: radius and lifespan both at/above threshold; B: radius only;
// C: lifespan only; Other: neither. Thresholds are the given quantiles
// of the run's own distributions. Fewer than 4 clusters leaves the
// thresholds undefined and labels everything Other with a warning.
RegionClassification classify_regions(std::span<const double> radii,
                                      std::span<const double> lifespans,
                                      double radius_quantile = 0.75,
                                      double lifespan_quantile = 0.75);

}  // namespace quotecross
