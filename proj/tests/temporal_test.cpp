#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "quotecross/errors.hpp"
#include "quotecross/temporal.hpp"
#include "test_util.hpp"

using namespace quotecross;

namespace {

Date d(const char* s) { return *parse_date(s); }

QuoteCluster cluster_with(std::string id, std::vector<const char*> offline_days,
                          std::vector<const char*> online_days = {}) {
    QuoteCluster c;
    c.cluster_id = std::move(id);
    c.canonical = "key " + c.cluster_id;
    c.loose_keys = {c.canonical};
    int n = 0;
    for (const char* day : offline_days) {
        c.offline_occurrences.push_back({"e" + std::to_string(++n), d(day), std::nullopt});
    }
    n = 0;
    for (const char* day : online_days) {
        c.online_mentions.push_back(
            {"p" + std::to_string(++n), d(day), "forum", MatchKind::Exact});
    }
    return c;
}

// Independent mean/population-SD recomputation.
void mean_sd(const std::vector<double>& xs, double& mean, double& sd) {
    mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double acc = 0.0;
    for (double x : xs) acc += (x - mean) * (x - mean);
    sd = std::sqrt(acc / static_cast<double>(xs.size()));
}

}  // namespace

TEST_CASE("direction names round-trip") {
    for (Direction dir : {Direction::OnlineFirst, Direction::OfflineFirst, Direction::SameDay,
                          Direction::OfflineOnly, Direction::OnlineOnly}) {
        auto parsed = parse_direction(direction_name(dir));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == dir);
    }
    CHECK(direction_name(Direction::OnlineFirst) == "online_first");
    CHECK(direction_name(Direction::SameDay) == "same_day");
    CHECK_FALSE(parse_direction("sideways").has_value());
}

TEST_CASE("lifespan: offline extent in days") {
    CHECK(lifespan(cluster_with("c1", {"2018-05-04"})) == 0);
    CHECK(lifespan(cluster_with("c2", {"2018-01-01", "2018-01-11"})) == 10);
    CHECK(lifespan(cluster_with("c3", {"2018-01-11", "2018-01-01"})) == 10);  // order-free
    CHECK(lifespan(cluster_with("c4", {"2018-03-05", "2017-11-20", "2018-01-02"})) ==
          days_between(d("2017-11-20"), d("2018-03-05")));

    // Duplicated dates change nothing; online mentions are ignored.
    auto c = cluster_with("c5", {"2018-01-01", "2018-01-01", "2018-02-15"},
                          {"2016-01-01", "2020-01-01"});
    CHECK(lifespan(c) == 45);
}

TEST_CASE("restrict_window: trims activity and drops emptied clusters") {
    std::vector<QuoteCluster> clusters = {
        cluster_with("c1", {"2017-06-01", "2018-02-01", "2019-05-05"}, {"2018-03-01"}),
        cluster_with("c2", {"2017-01-01", "2017-12-31"}),                  // fully outside
        cluster_with("c3", {"2018-06-01"}, {"2020-01-01"}),                // online outside
        cluster_with("c4", {}, {"2018-01-05", "2018-01-05", "2019-12-31"}),  // online only
    };
    auto out = restrict_window(clusters, d("2018-01-01"), d("2019-12-31"));

    REQUIRE(out.size() == 3);
    CHECK(out[0].cluster_id == "c1");
    CHECK(out[0].offline_count() == 2);  // 2017 event dropped
    CHECK(out[0].online_count() == 1);
    CHECK(out[1].cluster_id == "c3");
    CHECK(out[1].offline_count() == 1);
    CHECK(out[1].online_count() == 0);
    CHECK(out[2].cluster_id == "c4");
    CHECK(out[2].online_count() == 3);  // boundary days are inclusive

    // Input is untouched.
    CHECK(clusters[0].offline_count() == 3);

    // Window boundaries are inclusive on both ends.
    auto exact = restrict_window({cluster_with("cx", {"2018-01-01", "2019-12-31"})},
                                 d("2018-01-01"), d("2019-12-31"));
    REQUIRE(exact.size() == 1);
    CHECK(exact[0].offline_count() == 2);

    // Inverted windows are a configuration error.
    CHECK_THROWS_AS(restrict_window(clusters, d("2019-01-01"), d("2018-01-01")), ConfigError);
}

TEST_CASE("restrict_window: idempotent, and nested windows compose") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> day(0, 1800);
    std::vector<QuoteCluster> clusters;
    const Date base = d("2015-01-01");
    for (int i = 0; i < 40; ++i) {
        QuoteCluster c;
        c.cluster_id = "c" + std::to_string(i);
        c.canonical = "k" + std::to_string(i);
        c.loose_keys = {c.canonical};
        std::uniform_int_distribution<int> n(0, 6);
        const int noff = n(rng), non = n(rng);
        for (int j = 0; j < noff; ++j) {
            c.offline_occurrences.push_back(
                {"e" + std::to_string(j), base + std::chrono::days(day(rng)), std::nullopt});
        }
        for (int j = 0; j < non; ++j) {
            c.online_mentions.push_back({"p" + std::to_string(j),
                                         base + std::chrono::days(day(rng)), "forum",
                                         MatchKind::Loose});
        }
        if (noff + non > 0) clusters.push_back(std::move(c));
    }

    const Date w1s = d("2016-01-01"), w1e = d("2019-06-30");
    const Date w2s = d("2017-01-01"), w2e = d("2018-12-31");

    auto once = restrict_window(clusters, w1s, w1e);
    auto again = restrict_window(once, w1s, w1e);
    REQUIRE(again.size() == once.size());
    for (std::size_t i = 0; i < once.size(); ++i) {
        CHECK(again[i].offline_count() == once[i].offline_count());
        CHECK(again[i].online_count() == once[i].online_count());
    }

    // Applying a wide then a narrow window equals the narrow window alone
    // (the narrow window is contained in the wide one).
    auto nested = restrict_window(once, w2s, w2e);
    auto direct = restrict_window(clusters, w2s, w2e);
    REQUIRE(nested.size() == direct.size());
    for (std::size_t i = 0; i < nested.size(); ++i) {
        CHECK(nested[i].cluster_id == direct[i].cluster_id);
        CHECK(nested[i].offline_count() == direct[i].offline_count());
        CHECK(nested[i].online_count() == direct[i].online_count());
    }
}

TEST_CASE("lead_lag: direction and gap per cluster") {
    // Online precedes offline by 59 days.
    auto r = lead_lag(cluster_with("c1", {"2018-03-01", "2018-06-01"}, {"2018-01-01"}));
    CHECK(r.cluster_id == "c1");
    CHECK(r.direction == Direction::OnlineFirst);
    REQUIRE(r.gap_days.has_value());
    CHECK(*r.gap_days == 59);
    CHECK(r.first_offline == d("2018-03-01"));
    CHECK(r.first_online == d("2018-01-01"));

    // Offline precedes online; gap is still positive.
    r = lead_lag(cluster_with("c2", {"2018-01-01"}, {"2018-01-31", "2018-06-01"}));
    CHECK(r.direction == Direction::OfflineFirst);
    CHECK(*r.gap_days == 30);

    r = lead_lag(cluster_with("c3", {"2018-05-05"}, {"2018-05-05"}));
    CHECK(r.direction == Direction::SameDay);
    CHECK(*r.gap_days == 0);

    r = lead_lag(cluster_with("c4", {"2018-05-05"}));
    CHECK(r.direction == Direction::OfflineOnly);
    CHECK_FALSE(r.gap_days.has_value());
    CHECK_FALSE(r.first_online.has_value());

    r = lead_lag(cluster_with("c5", {}, {"2018-05-05"}));
    CHECK(r.direction == Direction::OnlineOnly);
    CHECK_FALSE(r.gap_days.has_value());
    CHECK_FALSE(r.first_offline.has_value());

    // Only the minimum date per medium matters.
    r = lead_lag(cluster_with("c6", {"2019-01-01", "2018-02-01"}, {"2018-02-01", "2019-06-01"}));
    CHECK(r.direction == Direction::SameDay);
}

TEST_CASE("lead_lag: swapping media mirrors the direction") {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> day(0, 1000);
    const Date base = d("2017-01-01");
    for (int t = 0; t < 200; ++t) {
        std::uniform_int_distribution<int> n(1, 5);
        QuoteCluster c;
        c.cluster_id = "c";
        const int noff = n(rng), non = n(rng);
        for (int j = 0; j < noff; ++j) {
            c.offline_occurrences.push_back(
                {"e", base + std::chrono::days(day(rng)), std::nullopt});
        }
        for (int j = 0; j < non; ++j) {
            c.online_mentions.push_back(
                {"p", base + std::chrono::days(day(rng)), "forum", MatchKind::Exact});
        }
        QuoteCluster swapped;
        swapped.cluster_id = "c";
        for (const auto& m : c.online_mentions) {
            swapped.offline_occurrences.push_back({"e", m.date, std::nullopt});
        }
        for (const auto& o : c.offline_occurrences) {
            swapped.online_mentions.push_back({"p", o.date, "forum", MatchKind::Exact});
        }

        auto a = lead_lag(c);
        auto b = lead_lag(swapped);
        CHECK(a.gap_days == b.gap_days);
        if (a.direction == Direction::OnlineFirst) CHECK(b.direction == Direction::OfflineFirst);
        if (a.direction == Direction::OfflineFirst) CHECK(b.direction == Direction::OnlineFirst);
        if (a.direction == Direction::SameDay) CHECK(b.direction == Direction::SameDay);

        // Shifting every date by a constant changes nothing.
        QuoteCluster shifted = c;
        for (auto& o : shifted.offline_occurrences) o.date += std::chrono::days(97);
        for (auto& m : shifted.online_mentions) m.date += std::chrono::days(97);
        auto s = lead_lag(shifted);
        CHECK(s.direction == a.direction);
        CHECK(s.gap_days == a.gap_days);
    }
}

TEST_CASE("crossover_stats: bucket counts and directional share") {
    std::vector<CrossoverRecord> records;
    // 87 online-first with gap 10, 13 offline-first with gap 4.
    for (int i = 0; i < 87; ++i) {
        records.push_back({"a" + std::to_string(i), d("2018-02-01"), d("2018-01-22"),
                           Direction::OnlineFirst, 10});
    }
    for (int i = 0; i < 13; ++i) {
        records.push_back({"b" + std::to_string(i), d("2018-01-01"), d("2018-01-05"),
                           Direction::OfflineFirst, 4});
    }
    auto stats = crossover_stats(records);
    CHECK(stats.n_both == 100);
    CHECK(stats.n_online_first == 87);
    CHECK(stats.n_offline_first == 13);
    CHECK(stats.n_same_day == 0);
    REQUIRE(stats.pct_online_first.has_value());
    CHECK(*stats.pct_online_first == 87.0 / 100.0);
    CHECK(*stats.mean_gap_online_first == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(*stats.sd_gap_online_first == doctest::Approx(0.0).scale(1.0));
    CHECK(*stats.mean_gap_offline_first == doctest::Approx(4.0).epsilon(1e-12));
    CHECK_FALSE(stats.window_start.has_value());

    // Same-day records count toward n_both but neither directional bucket.
    records.push_back({"s", d("2018-01-01"), d("2018-01-01"), Direction::SameDay, 0});
    records.push_back({"x", d("2018-01-01"), std::nullopt, Direction::OfflineOnly, std::nullopt});
    records.push_back({"y", std::nullopt, d("2018-01-01"), Direction::OnlineOnly, std::nullopt});
    stats = crossover_stats(records, d("2018-01-01"), d("2019-12-31"));
    CHECK(stats.n_both == 101);
    CHECK(stats.n_same_day == 1);
    CHECK(*stats.pct_online_first == 87.0 / 100.0);  // unchanged by SameDay
    CHECK(stats.window_start == d("2018-01-01"));
    CHECK(stats.window_end == d("2019-12-31"));
}

TEST_CASE("crossover_stats: gap moments match a direct recomputation") {
    std::mt19937 rng(606);
    std::uniform_int_distribution<int> gap(0, 400);
    std::vector<CrossoverRecord> records;
    std::vector<double> on_gaps, off_gaps;
    for (int i = 0; i < 250; ++i) {
        const int g = gap(rng);
        if (i % 3 == 0) {
            records.push_back({"c" + std::to_string(i), d("2018-06-01"),
                               d("2018-06-01") - std::chrono::days(g), Direction::OnlineFirst,
                               g});
            on_gaps.push_back(g);
        } else {
            records.push_back({"c" + std::to_string(i), d("2018-06-01"),
                               d("2018-06-01") + std::chrono::days(g),
                               g == 0 ? Direction::SameDay : Direction::OfflineFirst,
                               g});
            if (g != 0) off_gaps.push_back(g);
        }
    }
    auto stats = crossover_stats(records);

    double mean = 0.0, sd = 0.0;
    mean_sd(on_gaps, mean, sd);
    CHECK(*stats.mean_gap_online_first == doctest::Approx(mean).epsilon(1e-9));
    CHECK(*stats.sd_gap_online_first == doctest::Approx(sd).epsilon(1e-9));
    mean_sd(off_gaps, mean, sd);
    CHECK(*stats.mean_gap_offline_first == doctest::Approx(mean).epsilon(1e-9));
    CHECK(*stats.sd_gap_offline_first == doctest::Approx(sd).epsilon(1e-9));
    CHECK(stats.n_online_first == on_gaps.size());
    CHECK(stats.n_offline_first == off_gaps.size());
    CHECK(*stats.pct_online_first ==
          doctest::Approx(static_cast<double>(on_gaps.size()) /
                          static_cast<double>(on_gaps.size() + off_gaps.size()))
              .epsilon(1e-12));
}

TEST_CASE("crossover_stats: absent values stay absent, never NaN") {
    // Single online-first record: SD is exactly 0, offline-first moments absent.
    std::vector<CrossoverRecord> one = {
        {"c1", d("2018-02-01"), d("2018-01-01"), Direction::OnlineFirst, 31}};
    auto stats = crossover_stats(one);
    CHECK(stats.n_both == 1);
    CHECK(*stats.pct_online_first == 1.0);
    CHECK(*stats.mean_gap_online_first == 31.0);
    CHECK(*stats.sd_gap_online_first == 0.0);
    CHECK_FALSE(stats.mean_gap_offline_first.has_value());
    CHECK_FALSE(stats.sd_gap_offline_first.has_value());

    // Only same-day and single-medium records: no directional share at all.
    std::vector<CrossoverRecord> none = {
        {"c1", d("2018-01-01"), d("2018-01-01"), Direction::SameDay, 0},
        {"c2", d("2018-01-01"), std::nullopt, Direction::OfflineOnly, std::nullopt},
    };
    stats = crossover_stats(none);
    CHECK(stats.n_both == 1);
    CHECK_FALSE(stats.pct_online_first.has_value());
    CHECK_FALSE(stats.mean_gap_online_first.has_value());

    auto empty = crossover_stats(std::vector<CrossoverRecord>{});
    CHECK(empty.n_both == 0);
    CHECK_FALSE(empty.pct_online_first.has_value());
}

TEST_CASE("quantile_linear matches the numpy-style definition") {
    std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
    CHECK(quantile_linear(v, 0.0) == doctest::Approx(1.0));
    CHECK(quantile_linear(v, 1.0) == doctest::Approx(4.0));
    CHECK(quantile_linear(v, 0.5) == doctest::Approx(2.5));
    CHECK(quantile_linear(v, 0.75) == doctest::Approx(3.25));
    CHECK(quantile_linear(v, 0.25) == doctest::Approx(1.75));

    std::vector<double> single = {42.0};
    CHECK(quantile_linear(single, 0.0) == 42.0);
    CHECK(quantile_linear(single, 0.75) == 42.0);
    CHECK(quantile_linear(single, 1.0) == 42.0);

    // Unsorted input is handled.
    std::vector<double> shuffled = {4.0, 1.0, 3.0, 2.0};
    CHECK(quantile_linear(shuffled, 0.75) == doctest::Approx(3.25));

    // Five elements: h = 4 * 0.75 = 3 exactly.
    std::vector<double> five = {10.0, 20.0, 30.0, 40.0, 50.0};
    CHECK(quantile_linear(five, 0.75) == doctest::Approx(40.0));
    CHECK(quantile_linear(five, 0.6) == doctest::Approx(34.0));  // h=2.4
}

TEST_CASE("classify_regions: quantile thresholds and labels") {
    // Eight clusters with hand-checkable quantiles. Sorted radii:
    // 1..8 -> q0.75 at h=5.25 -> 6.25. Sorted lifespans: 10..80 -> 62.5.
    std::vector<double> radii = {1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<double> lifespans = {10, 20, 30, 40, 50, 60, 70, 80};
    auto result = classify_regions(radii, lifespans);
    REQUIRE(result.thresholds.defined);
    CHECK(result.thresholds.radius == doctest::Approx(6.25));
    CHECK(result.thresholds.lifespan == doctest::Approx(62.5));
    CHECK_FALSE(result.warning.has_value());
    REQUIRE(result.labels.size() == 8);
    // Pairs: (1,10)..(8,80) aligned; wide+lasting only at the top.
    CHECK(result.labels[7] == Region::A);  // 8 >= 6.25, 80 >= 62.5
    CHECK(result.labels[6] == Region::A);  // 7, 70
    CHECK(result.labels[5] == Region::Other);  // 6 < 6.25, 60 < 62.5
    CHECK(result.labels[0] == Region::Other);

    // Cross pairing: high radius + low lifespan = B; the reverse = C.
    std::vector<double> r2 = {8, 1, 1, 1, 1, 1, 1, 8};
    std::vector<double> l2 = {10, 80, 10, 10, 10, 10, 10, 80};
    auto cross = classify_regions(r2, l2);
    REQUIRE(cross.thresholds.defined);
    // radius threshold: sorted {1*6, 8, 8} q0.75 -> between 1 and 8.
    CHECK(cross.labels[0] == Region::B);  // wide, short-lived
    CHECK(cross.labels[1] == Region::C);  // narrow, long-lived
    CHECK(cross.labels[7] == Region::A);
    CHECK(cross.labels[2] == Region::Other);

    CHECK(region_name(Region::A) == "A");
    CHECK(region_name(Region::Other) == "other");

    // Custom quantiles move the bar.
    auto strict = classify_regions(radii, lifespans, 1.0, 1.0);
    CHECK(strict.thresholds.radius == doctest::Approx(8.0));
    int a_count = 0;
    for (auto r : strict.labels) a_count += r == Region::A;
    CHECK(a_count == 1);
}

TEST_CASE("classify_regions: fewer than 4 clusters is undefined") {
    std::vector<double> radii = {1, 2, 3};
    std::vector<double> lifespans = {10, 20, 30};
    auto result = classify_regions(radii, lifespans);
    CHECK_FALSE(result.thresholds.defined);
    REQUIRE(result.warning.has_value());
    CHECK(result.warning->find("fewer than 4") != std::string::npos);
    REQUIRE(result.labels.size() == 3);
    for (auto r : result.labels) CHECK(r == Region::Other);

    auto empty = classify_regions({}, {});
    CHECK_FALSE(empty.thresholds.defined);
    CHECK(empty.labels.empty());
    CHECK(empty.warning.has_value());
}
