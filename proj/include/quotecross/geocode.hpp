#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "quotecross/diagnostics.hpp"
#include "quotecross/geo.hpp"

namespace quotecross {

// Disk-backed (city, state) -> coordinate cache. Keys are case-folded
// city plus uppercased state; entries tagged "override" always shadow
// service results.
class GeoCache {
  public:
    struct Entry {
        GeoPoint point;
        std::string source;      // "service" or "override"
        std::string fetched_at;  // ISO timestamp, empty for overrides
    };

    static std::string key(std::string_view city, std::string_view state);

    std::optional<Entry> lookup(std::string_view city, std::string_view state) const;
    void put(std::string_view city, std::string_view state, const Entry& entry);

    // JSONL of {key, lat, lon, source, fetched_at}; missing file is an
    // empty cache.
    static GeoCache load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    std::size_t size() const { return entries_.size(); }
    bool dirty() const { return dirty_; }

  private:
    std::map<std::string, Entry> entries_;  // ordered for a stable save
    bool dirty_ = false;
};

// CSV columns city,state,lat,lon. Malformed rows and out-of-range
// coordinates are fatal.
GeoCache load_overrides(const std::filesystem::path& path);

// One service lookup attempt.
struct GeocodeResponse {
    bool transport_error = false;      // timeout / HTTP failure; retryable
    std::string error;                 // description when transport_error
    std::vector<GeoPoint> candidates;  // may be empty: location unknown
};

class GeocoderClient {
  public:
    virtual ~GeocoderClient() = default;
    virtual GeocodeResponse lookup(const std::string& city, const std::string& state) = 0;
};

// GET <base_url>?city=<city>&state=<state>, expecting a JSON array of
// objects with lat/lon fields (numbers or numeric strings).
class HttpGeocoderClient : public GeocoderClient {
  public:
    HttpGeocoderClient(std::string base_url, int timeout_ms);
    GeocodeResponse lookup(const std::string& city, const std::string& state) override;

  private:
    std::string base_url_;
    int timeout_ms_;
};

struct GeocoderPolicy {
    double rate_limit_per_sec = 1.0;  // max service queries per second
    int max_retries = 3;              // additional attempts after the first
    int backoff_ms = 250;             // doubled per retry
};

struct GeocodeCounters {
    std::size_t cache_hits = 0;
    std::size_t override_hits = 0;
    std::size_t service_calls = 0;  // attempts, including retries
    std::size_t ambiguous = 0;
    std::size_t failures = 0;
};

// Resolution order: override, cache, then one rate-limited service query
// (with retries on transport errors). Ambiguous multi-candidate responses
// take the first candidate and are flagged for review. Unresolvable
// locations return nullopt with a diagnostic and the event is excluded
// from spatial analysis.
class Geocoder {
  public:
    Geocoder(GeoCache& cache, const GeoCache& overrides, GeocoderClient& client,
             GeocoderPolicy policy);

    std::optional<GeoPoint> resolve(const std::string& city, const std::string& state,
                                    Diagnostics& diagnostics);

    const GeocodeCounters& counters() const { return counters_; }

  private:
    void rate_limit();

    GeoCache& cache_;
    const GeoCache& overrides_;
    GeocoderClient& client_;
    GeocoderPolicy policy_;
    GeocodeCounters counters_;
    long long last_query_us_ = -1;
};

}  // namespace quotecross
