#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "quotecross/errors.hpp"
#include "quotecross/geo.hpp"
#include "quotecross/geocode.hpp"
#include "test_util.hpp"

using namespace quotecross;

namespace {

std::vector<GeoPoint> random_points(std::mt19937& rng, std::size_t n) {
    std::uniform_real_distribution<double> lat(24.0, 49.0);
    std::uniform_real_distribution<double> lon(-125.0, -66.0);
    std::vector<GeoPoint> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) pts.push_back({lat(rng), lon(rng)});
    return pts;
}

// Direct transcription of the definition: sqrt(mean of squared distances
// to the centroid), used as an independent check.
double direct_planar_radius(const std::vector<GeoPoint>& pts) {
    double mlat = 0.0, mlon = 0.0;
    for (const auto& p : pts) {
        mlat += p.lat;
        mlon += p.lon;
    }
    mlat /= static_cast<double>(pts.size());
    mlon /= static_cast<double>(pts.size());
    double acc = 0.0;
    for (const auto& p : pts) {
        const double dlat = p.lat - mlat;
        const double dlon = p.lon - mlon;
        acc += dlat * dlat + dlon * dlon;
    }
    return std::sqrt(acc / static_cast<double>(pts.size()));
}

// A scriptable geocoding service double that counts lookups.
struct StubClient : GeocoderClient {
    std::map<std::string, GeocodeResponse> responses;  // "city|STATE" -> response
    GeocodeResponse fallback;                          // used when no entry matches
    std::size_t calls = 0;
    std::vector<std::string> seen;

    StubClient() { fallback.candidates = {}; }

    GeocodeResponse lookup(const std::string& city, const std::string& state) override {
        ++calls;
        seen.push_back(city + "|" + state);
        auto it = responses.find(GeoCache::key(city, state));
        return it == responses.end() ? fallback : it->second;
    }
};

GeocoderPolicy fast_policy() {
    GeocoderPolicy policy;
    policy.rate_limit_per_sec = 1e6;  // keep tests fast
    policy.max_retries = 2;
    policy.backoff_ms = 0;
    return policy;
}

}  // namespace

TEST_CASE("geopoint range checking") {
    CHECK(GeoPoint::in_range(0.0, 0.0));
    CHECK(GeoPoint::in_range(90.0, 180.0));
    CHECK(GeoPoint::in_range(-90.0, -180.0));
    CHECK_FALSE(GeoPoint::in_range(90.5, 0.0));
    CHECK_FALSE(GeoPoint::in_range(0.0, -180.5));
    CHECK_FALSE(GeoPoint::in_range(std::nan(""), 0.0));
    CHECK(GeoPoint::checked(40.0, -75.0).has_value());
    CHECK_FALSE(GeoPoint::checked(91.0, 0.0).has_value());
}

TEST_CASE("haversine distances") {
    // One degree of longitude at the equator: pi * R / 180 with the
    // IUGG mean radius 6371.0088 km.
    const double one_degree = 111.1950802335329;
    CHECK(haversine_km({0.0, 0.0}, {0.0, 1.0}) == doctest::Approx(one_degree).epsilon(1e-9));
    CHECK(haversine_km({0.0, 0.0}, {1.0, 0.0}) == doctest::Approx(one_degree).epsilon(1e-9));
    CHECK(haversine_km({40.0, -75.0}, {40.0, -75.0}) == 0.0);
    // Symmetric.
    CHECK(haversine_km({40.7, -74.0}, {51.5, -0.1}) ==
          doctest::Approx(haversine_km({51.5, -0.1}, {40.7, -74.0})).epsilon(1e-12));
    // At 60N a degree of longitude is half as long as at the equator.
    CHECK(haversine_km({60.0, 0.0}, {60.0, 1.0}) ==
          doctest::Approx(one_degree / 2.0).epsilon(1e-4));
    // Antipodal points: half the circumference.
    CHECK(haversine_km({0.0, 0.0}, {0.0, 180.0}) == doctest::Approx(one_degree * 180).epsilon(1e-9));
}

TEST_CASE("centroid") {
    std::vector<GeoPoint> one = {{40.0, -75.0}};
    auto c = centroid(one);
    CHECK(c.lat == 40.0);
    CHECK(c.lon == -75.0);

    std::vector<GeoPoint> two = {{0.0, 0.0}, {0.0, 2.0}};
    c = centroid(two);
    CHECK(c.lat == 0.0);
    CHECK(c.lon == 1.0);

    std::mt19937 rng(5);
    auto pts = random_points(rng, 100);
    c = centroid(pts);
    double mlat = 0.0, mlon = 0.0;
    for (const auto& p : pts) {
        mlat += p.lat;
        mlon += p.lon;
    }
    CHECK(c.lat == doctest::Approx(mlat / 100.0).epsilon(1e-12));
    CHECK(c.lon == doctest::Approx(mlon / 100.0).epsilon(1e-12));
}

TEST_CASE("radius of gyration: fixed examples") {
    // Two points two degrees apart: every point is 1 degree from the center.
    std::vector<GeoPoint> pts = {{0.0, 0.0}, {0.0, 2.0}};
    CHECK(radius_of_gyration(pts, GyrationMode::Planar) == doctest::Approx(1.0).epsilon(1e-12));

    // Singleton and coincident points have zero spread, exactly.
    std::vector<GeoPoint> one = {{40.0, -75.0}};
    CHECK(radius_of_gyration(one, GyrationMode::Planar) == 0.0);
    std::vector<GeoPoint> same = {{40.0, -75.0}, {40.0, -75.0}, {40.0, -75.0}};
    CHECK(radius_of_gyration(same, GyrationMode::Planar) == 0.0);
    CHECK(radius_of_gyration(same, GyrationMode::GreatCircle) == 0.0);

    // 3-4-5 style: four corners of a rectangle.
    std::vector<GeoPoint> rect = {{3.0, 4.0}, {3.0, -4.0}, {-3.0, 4.0}, {-3.0, -4.0}};
    CHECK(radius_of_gyration(rect, GyrationMode::Planar) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("radius of gyration: properties against the direct formula") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        std::uniform_int_distribution<std::size_t> size(1, 40);
        auto pts = random_points(rng, size(rng));
        const double lib = radius_of_gyration(pts, GyrationMode::Planar);
        const double direct = direct_planar_radius(pts);
        CHECK(lib == doctest::Approx(direct).epsilon(1e-9));

        // Translation invariance.
        auto shifted = pts;
        for (auto& p : shifted) {
            p.lat += 1.5;
            p.lon -= 3.25;
        }
        CHECK(radius_of_gyration(shifted, GyrationMode::Planar) ==
              doctest::Approx(lib).epsilon(1e-9));

        // Duplicating the whole set leaves the radius unchanged.
        auto doubled = pts;
        doubled.insert(doubled.end(), pts.begin(), pts.end());
        CHECK(radius_of_gyration(doubled, GyrationMode::Planar) ==
              doctest::Approx(lib).epsilon(1e-9));
    }

    // Scaling all offsets from the centroid scales the planar radius.
    std::vector<GeoPoint> pts = {{10.0, 10.0}, {12.0, 14.0}, {8.0, 9.0}, {11.0, 11.0}};
    const double base = radius_of_gyration(pts, GyrationMode::Planar);
    auto c = centroid(pts);
    auto scaled = pts;
    for (auto& p : scaled) {
        p.lat = c.lat + 2.0 * (p.lat - c.lat);
        p.lon = c.lon + 2.0 * (p.lon - c.lon);
    }
    CHECK(radius_of_gyration(scaled, GyrationMode::Planar) ==
          doctest::Approx(2.0 * base).epsilon(1e-12));
}

TEST_CASE("radius of gyration: great-circle mode") {
    // Same centroid as planar mode; distances in km via haversine.
    std::vector<GeoPoint> pts = {{0.0, -1.0}, {0.0, 1.0}};
    const double deg_km = 111.1950802335329;
    CHECK(radius_of_gyration(pts, GyrationMode::GreatCircle) ==
          doctest::Approx(deg_km).epsilon(1e-9));

    std::mt19937 rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        std::uniform_int_distribution<std::size_t> size(1, 20);
        auto sample = random_points(rng, size(rng));
        auto center = centroid(sample);
        double acc = 0.0;
        for (const auto& p : sample) {
            const double d = haversine_km(center, p);
            acc += d * d;
        }
        const double expect = std::sqrt(acc / static_cast<double>(sample.size()));
        CHECK(radius_of_gyration(sample, GyrationMode::GreatCircle) ==
              doctest::Approx(expect).epsilon(1e-9));
    }

    CHECK(parse_gyration_mode("planar") == GyrationMode::Planar);
    CHECK(parse_gyration_mode("great_circle") == GyrationMode::GreatCircle);
    CHECK_FALSE(parse_gyration_mode("spherical").has_value());
    CHECK(gyration_mode_name(GyrationMode::Planar) == "planar");
    CHECK(gyration_mode_name(GyrationMode::GreatCircle) == "great_circle");
}

TEST_CASE("propaganda center weights cluster centroids by frequency") {
    std::vector<WeightedCentroid> centers = {{{40.0, -80.0}, 3}, {{30.0, -90.0}, 1}};
    auto c = propaganda_center(centers);
    CHECK(c.lat == doctest::Approx(37.5).epsilon(1e-12));
    CHECK(c.lon == doctest::Approx(-82.5).epsilon(1e-12));

    // Equal weights reduce to the plain centroid of the centers.
    std::vector<WeightedCentroid> equal = {{{10.0, 20.0}, 2}, {{30.0, 40.0}, 2}};
    c = propaganda_center(equal);
    CHECK(c.lat == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(c.lon == doctest::Approx(30.0).epsilon(1e-12));

    std::vector<WeightedCentroid> single = {{{40.0, -75.0}, 7}};
    c = propaganda_center(single);
    CHECK(c.lat == 40.0);
    CHECK(c.lon == -75.0);
}

TEST_CASE("directional comparison to a reference point") {
    auto d = compare_to_reference({40.0, -90.0}, {38.0, -92.0});
    CHECK(d.dlat == doctest::Approx(2.0));
    CHECK(d.dlon == doctest::Approx(2.0));
    CHECK(d.quadrant == Quadrant::NE);
    CHECK(quadrant_name(Quadrant::NE) == "NE");
    CHECK(quadrant_name(Quadrant::Coincident) == "coincident");

    CHECK(compare_to_reference({36.0, -94.0}, {38.0, -92.0}).quadrant == Quadrant::SW);
    CHECK(compare_to_reference({40.0, -94.0}, {38.0, -92.0}).quadrant == Quadrant::NW);
    CHECK(compare_to_reference({36.0, -90.0}, {38.0, -92.0}).quadrant == Quadrant::SE);
    CHECK(compare_to_reference({38.0, -92.0}, {38.0, -92.0}).quadrant == Quadrant::Coincident);

    // A pure-axis displacement is labeled by the moving axis only.
    CHECK(compare_to_reference({40.0, -92.0}, {38.0, -92.0}).quadrant == Quadrant::NE);
    // Within tolerance counts as no displacement.
    CHECK(compare_to_reference({38.0 + 1e-9, -92.0}, {38.0, -92.0}).quadrant ==
          Quadrant::Coincident);
}

TEST_CASE("geocache: keys, round trip, malformed input") {
    CHECK(GeoCache::key("Boise", "id") == "boise|ID");
    CHECK(GeoCache::key("  Boise  ", "Id") == "boise|ID");
    CHECK(GeoCache::key("CHEYENNE", "WY") == "cheyenne|WY");
    CHECK(GeoCache::key("Coeur d'Alene", "ID") == "coeur d'alene|ID");

    GeoCache cache;
    CHECK_FALSE(cache.dirty());
    cache.put("Boise", "ID", {{43.6135, -116.2035}, "service", "2025-11-04T09:00:00Z"});
    CHECK(cache.dirty());
    auto hit = cache.lookup("  BOISE ", "id");
    REQUIRE(hit.has_value());
    CHECK(hit->point.lat == doctest::Approx(43.6135));
    CHECK(hit->source == "service");
    CHECK_FALSE(cache.lookup("Salem", "OR").has_value());

    qctest::TempDir tmp("geocache");
    cache.save(tmp.path / "cache.jsonl");
    auto loaded = GeoCache::load(tmp.path / "cache.jsonl");
    CHECK(loaded.size() == 1);
    CHECK_FALSE(loaded.dirty());
    auto entry = loaded.lookup("Boise", "ID");
    REQUIRE(entry.has_value());
    CHECK(entry->point.lon == doctest::Approx(-116.2035));
    CHECK(entry->fetched_at == "2025-11-04T09:00:00Z");

    // Missing file: empty cache. Malformed line or bad coordinates: fatal.
    CHECK(GeoCache::load(tmp.path / "missing.jsonl").size() == 0);
    qctest::write_file(tmp.path / "bad.jsonl", "{not json\n");
    CHECK_THROWS_AS(GeoCache::load(tmp.path / "bad.jsonl"), FatalError);
    qctest::write_file(tmp.path / "range.jsonl",
                       R"({"key":"x|XX","lat":95.0,"lon":0.0,"source":"service","fetched_at":""})"
                       "\n");
    CHECK_THROWS_AS(GeoCache::load(tmp.path / "range.jsonl"), FatalError);
}

TEST_CASE("override file loading") {
    qctest::TempDir tmp("overrides");
    qctest::write_file(tmp.path / "o.csv",
                       "city,state,lat,lon\n"
                       "Mattson,IL,39.4831,-88.3728\n"
                       "Boise,ID,43.6135,-116.2035\n");
    auto overrides = load_overrides(tmp.path / "o.csv");
    CHECK(overrides.size() == 2);
    auto hit = overrides.lookup("mattson", "il");
    REQUIRE(hit.has_value());
    CHECK(hit->source == "override");
    CHECK(hit->point.lat == doctest::Approx(39.4831));

    qctest::write_file(tmp.path / "bad_coord.csv", "city,state,lat,lon\nX,YY,99.0,0.0\n");
    CHECK_THROWS_AS(load_overrides(tmp.path / "bad_coord.csv"), FatalError);
    qctest::write_file(tmp.path / "bad_num.csv", "city,state,lat,lon\nX,YY,abc,0.0\n");
    CHECK_THROWS_AS(load_overrides(tmp.path / "bad_num.csv"), FatalError);
    // A missing overrides file is simply an empty set; the pipeline
    // validates configured paths before getting here.
    CHECK(load_overrides(tmp.path / "nope.csv").size() == 0);
}

TEST_CASE("geocoder: cache hits never touch the service") {
    GeoCache cache;
    cache.put("Boise", "ID", {{43.6135, -116.2035}, "service", "2025-11-04T09:00:00Z"});
    GeoCache overrides;
    StubClient stub;
    Geocoder geocoder(cache, overrides, stub, fast_policy());

    Diagnostics diags;
    auto point = geocoder.resolve("Boise", "ID", diags);
    REQUIRE(point.has_value());
    CHECK(point->lat == doctest::Approx(43.6135));
    CHECK(stub.calls == 0);
    CHECK(diags.empty());
    CHECK(geocoder.counters().cache_hits == 1);
    CHECK(geocoder.counters().service_calls == 0);

    // Key normalization applies on the lookup path too.
    point = geocoder.resolve(" BOISE ", "id", diags);
    CHECK(point.has_value());
    CHECK(stub.calls == 0);
    CHECK(geocoder.counters().cache_hits == 2);
}

TEST_CASE("geocoder: overrides shadow both cache and service") {
    GeoCache cache;
    cache.put("Mattson", "IL", {{1.0, 1.0}, "service", "x"});  // stale wrong entry
    GeoCache overrides;
    overrides.put("Mattson", "IL", {{39.4831, -88.3728}, "override", ""});
    StubClient stub;
    stub.responses[GeoCache::key("Mattson", "IL")].candidates = {{2.0, 2.0}};
    Geocoder geocoder(cache, overrides, stub, fast_policy());

    Diagnostics diags;
    auto point = geocoder.resolve("Mattson", "IL", diags);
    REQUIRE(point.has_value());
    CHECK(point->lat == doctest::Approx(39.4831));  // the override, not cache or service
    CHECK(stub.calls == 0);
    CHECK(geocoder.counters().override_hits == 1);
    CHECK(diags.empty());
}

TEST_CASE("geocoder: service miss is cached and not re-queried") {
    GeoCache cache;
    GeoCache overrides;
    StubClient stub;
    stub.responses[GeoCache::key("Salem", "OR")].candidates = {{44.9429, -123.0351}};
    Geocoder geocoder(cache, overrides, stub, fast_policy());

    Diagnostics diags;
    auto point = geocoder.resolve("Salem", "OR", diags);
    REQUIRE(point.has_value());
    CHECK(point->lon == doctest::Approx(-123.0351));
    CHECK(stub.calls == 1);
    CHECK(cache.dirty());
    auto entry = cache.lookup("Salem", "OR");
    REQUIRE(entry.has_value());
    CHECK(entry->source == "service");
    CHECK_FALSE(entry->fetched_at.empty());

    // Second resolution of the same place: cache hit, no new call.
    point = geocoder.resolve("Salem", "OR", diags);
    CHECK(point.has_value());
    CHECK(stub.calls == 1);
    CHECK(diags.empty());
}

TEST_CASE("geocoder: ambiguous responses take the first candidate, flagged") {
    GeoCache cache;
    GeoCache overrides;
    StubClient stub;
    stub.responses[GeoCache::key("Springfield", "IL")].candidates = {{39.8, -89.65},
                                                                     {37.2, -93.3}};
    Geocoder geocoder(cache, overrides, stub, fast_policy());

    Diagnostics diags;
    auto point = geocoder.resolve("Springfield", "IL", diags);
    REQUIRE(point.has_value());
    CHECK(point->lat == doctest::Approx(39.8));  // first candidate
    CHECK(geocoder.counters().ambiguous == 1);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].reason.find("ambiguous") != std::string::npos);
    CHECK(diags[0].reason.find("flagged for review") != std::string::npos);
}

TEST_CASE("geocoder: unknown location fails without retries") {
    GeoCache cache;
    GeoCache overrides;
    StubClient stub;  // fallback: empty candidate list, no transport error
    Geocoder geocoder(cache, overrides, stub, fast_policy());

    Diagnostics diags;
    auto point = geocoder.resolve("Nowhere", "ZZ", diags);
    CHECK_FALSE(point.has_value());
    CHECK(stub.calls == 1);  // a definitive empty answer is not retried
    CHECK(geocoder.counters().failures == 1);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].reason.find("no result") != std::string::npos);
    CHECK_FALSE(cache.lookup("Nowhere", "ZZ").has_value());  // misses are not cached
}

TEST_CASE("geocoder: transport errors retry with backoff, then fail") {
    GeoCache cache;
    GeoCache overrides;
    StubClient stub;
    stub.fallback.transport_error = true;
    stub.fallback.error = "connect timeout";
    auto policy = fast_policy();
    policy.max_retries = 2;
    Geocoder geocoder(cache, overrides, stub, policy);

    Diagnostics diags;
    auto point = geocoder.resolve("Boise", "ID", diags);
    CHECK_FALSE(point.has_value());
    CHECK(stub.calls == 3);  // first attempt + 2 retries
    CHECK(geocoder.counters().service_calls == 3);
    CHECK(geocoder.counters().failures == 1);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].reason.find("after 3 attempts") != std::string::npos);
    CHECK(diags[0].reason.find("connect timeout") != std::string::npos);

    // Transient failure then success: resolved on the second attempt.
    struct Flipper : GeocoderClient {
        std::size_t calls = 0;
        GeocodeResponse lookup(const std::string&, const std::string&) override {
            ++calls;
            GeocodeResponse r;
            if (calls == 1) {
                r.transport_error = true;
                r.error = "reset";
            } else {
                r.candidates = {{43.6, -116.2}};
            }
            return r;
        }
    } flipper;
    GeoCache cache3;
    Geocoder geocoder3(cache3, overrides, flipper, policy);
    Diagnostics d3;
    auto p3 = geocoder3.resolve("Boise", "ID", d3);
    REQUIRE(p3.has_value());
    CHECK(flipper.calls == 2);
    CHECK(d3.empty());
    CHECK(cache3.lookup("Boise", "ID").has_value());
}
