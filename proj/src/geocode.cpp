#include "quotecross/geocode.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "quotecross/csv.hpp"
#include "quotecross/errors.hpp"
#include "quotecross/unicode.hpp"

namespace quotecross {

namespace {

std::string fold_city(std::string_view city) {
    // Trim ASCII whitespace, then case-fold; interior spacing kept as-is.
    std::size_t b = 0, e = city.size();
    while (b < e && (city[b] == ' ' || city[b] == '\t')) ++b;
    while (e > b && (city[e - 1] == ' ' || city[e - 1] == '\t')) --e;
    return uni::fold_utf8(city.substr(b, e - b));
}

std::string upper_state(std::string_view state) {
    std::string out;
    out.reserve(state.size());
    for (char c : state) {
        if (c == ' ' || c == '\t') continue;
        out.push_back(c >= 'a' && c <= 'z' ? static_cast<char>(c - 'a' + 'A') : c);
    }
    return out;
}

std::optional<double> json_coord(const nlohmann::json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string& s = v.get_ref<const std::string&>();
        try {
            std::size_t pos = 0;
            double d = std::stod(s, &pos);
            if (pos == s.size() && std::isfinite(d)) return d;
        } catch (const std::exception&) {
        }
    }
    return std::nullopt;
}

std::string now_utc_iso() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

std::string url_encode(const std::string& s) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
            c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xF]);
        }
    }
    return out;
}

}  // namespace

std::string GeoCache::key(std::string_view city, std::string_view state) {
    return fold_city(city) + "|" + upper_state(state);
}

std::optional<GeoCache::Entry> GeoCache::lookup(std::string_view city,
                                                std::string_view state) const {
    auto it = entries_.find(key(city, state));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void GeoCache::put(std::string_view city, std::string_view state, const Entry& entry) {
    entries_[key(city, state)] = entry;
    dirty_ = true;
}

GeoCache GeoCache::load(const std::filesystem::path& path) {
    GeoCache cache;
    std::ifstream in(path);
    if (!in) return cache;  // absent cache file starts empty
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw FatalError(path.string() + ":" + std::to_string(line_no) +
                             ": malformed cache line");
        }
        if (!j.contains("key") || !j["key"].is_string()) {
            throw FatalError(path.string() + ":" + std::to_string(line_no) +
                             ": cache line missing key");
        }
        auto lat = j.contains("lat") ? json_coord(j["lat"]) : std::nullopt;
        auto lon = j.contains("lon") ? json_coord(j["lon"]) : std::nullopt;
        if (!lat || !lon) {
            throw FatalError(path.string() + ":" + std::to_string(line_no) +
                             ": cache line missing lat/lon");
        }
        auto point = GeoPoint::checked(*lat, *lon);
        if (!point) {
            throw FatalError(path.string() + ":" + std::to_string(line_no) +
                             ": cache coordinate out of range");
        }
        Entry e;
        e.point = *point;
        e.source = j.value("source", std::string("service"));
        e.fetched_at = j.value("fetched_at", std::string());
        cache.entries_[j["key"].get<std::string>()] = e;
    }
    cache.dirty_ = false;
    return cache;
}

void GeoCache::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FatalError("cannot write geocode cache: " + path.string());
    for (const auto& [k, e] : entries_) {
        nlohmann::json j;
        j["key"] = k;
        j["lat"] = e.point.lat;
        j["lon"] = e.point.lon;
        j["source"] = e.source;
        j["fetched_at"] = e.fetched_at;
        out << j.dump() << '\n';
    }
}

GeoCache load_overrides(const std::filesystem::path& path) {
    GeoCache cache;
    std::ifstream in(path);
    if (!in) return cache;  // overrides are optional
    CsvReader reader(in);
    std::size_t line = 0;
    auto header = reader.next(line);
    if (!header) return cache;
    std::map<std::string, std::size_t> cols;
    for (std::size_t i = 0; i < header->size(); ++i) cols[(*header)[i]] = i;
    for (const char* need : {"city", "state", "lat", "lon"}) {
        if (!cols.count(need)) {
            throw FatalError(path.string() + ": overrides missing column '" + need + "'");
        }
    }
    while (auto row = reader.next(line)) {
        if (row->size() == 1 && (*row)[0].empty()) continue;
        if (row->size() != header->size()) {
            throw FatalError(path.string() + ":" + std::to_string(line) +
                             ": wrong field count in overrides");
        }
        double lat = 0, lon = 0;
        try {
            lat = std::stod((*row)[cols["lat"]]);
            lon = std::stod((*row)[cols["lon"]]);
        } catch (const std::exception&) {
            throw FatalError(path.string() + ":" + std::to_string(line) +
                             ": non-numeric override coordinate");
        }
        auto point = GeoPoint::checked(lat, lon);
        if (!point) {
            throw FatalError(path.string() + ":" + std::to_string(line) +
                             ": override coordinate out of range");
        }
        GeoCache::Entry e;
        e.point = *point;
        e.source = "override";
        cache.put((*row)[cols["city"]], (*row)[cols["state"]], e);
    }
    return cache;
}

HttpGeocoderClient::HttpGeocoderClient(std::string base_url, int timeout_ms)
    : base_url_(std::move(base_url)), timeout_ms_(timeout_ms) {}

GeocodeResponse HttpGeocoderClient::lookup(const std::string& city, const std::string& state) {
    GeocodeResponse resp;

    // Split base_url into host part and path prefix.
    std::string scheme_host = base_url_;
    std::string path_prefix = "/";
    auto scheme_end = base_url_.find("://");
    std::size_t path_start =
        base_url_.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    if (path_start != std::string::npos) {
        scheme_host = base_url_.substr(0, path_start);
        path_prefix = base_url_.substr(path_start);
    }
    std::string target =
        path_prefix + "?city=" + url_encode(city) + "&state=" + url_encode(state);

    httplib::Client client(scheme_host);
    client.set_connection_timeout(0, timeout_ms_ * 1000);
    client.set_read_timeout(0, timeout_ms_ * 1000);

    auto res = client.Get(target);
    if (!res) {
        resp.transport_error = true;
        resp.error = "transport failure: " + httplib::to_string(res.error());
        return resp;
    }
    if (res->status != 200) {
        resp.transport_error = true;
        resp.error = "http status " + std::to_string(res->status);
        return resp;
    }
    nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.is_array()) {
        resp.transport_error = true;
        resp.error = "response is not a JSON array";
        return resp;
    }
    for (const auto& item : j) {
        if (!item.is_object() || !item.contains("lat") || !item.contains("lon")) continue;
        const auto lat = json_coord(item["lat"]);
        const auto lon = json_coord(item["lon"]);
        if (lat && lon && GeoPoint::in_range(*lat, *lon)) {
            resp.candidates.push_back(GeoPoint{*lat, *lon});
        }
    }
    return resp;
}

Geocoder::Geocoder(GeoCache& cache, const GeoCache& overrides, GeocoderClient& client,
                   GeocoderPolicy policy)
    : cache_(cache), overrides_(overrides), client_(client), policy_(policy) {}

void Geocoder::rate_limit() {
    if (policy_.rate_limit_per_sec <= 0) return;
    auto now_us = [] {
        return std::chrono::duration_cast<std::chrono::microseconds>(
                   std::chrono::steady_clock::now().time_since_epoch())
            .count();
    };
    long long min_gap = static_cast<long long>(1e6 / policy_.rate_limit_per_sec);
    long long now = now_us();
    if (last_query_us_ >= 0 && now - last_query_us_ < min_gap) {
        std::this_thread::sleep_for(std::chrono::microseconds(min_gap - (now - last_query_us_)));
        now = now_us();
    }
    last_query_us_ = now;
}

std::optional<GeoPoint> Geocoder::resolve(const std::string& city, const std::string& state,
                                          Diagnostics& diagnostics) {
    if (auto hit = overrides_.lookup(city, state)) {
        ++counters_.override_hits;
        return hit->point;
    }
    if (auto hit = cache_.lookup(city, state)) {
        ++counters_.cache_hits;
        return hit->point;
    }

    std::string last_error;
    for (int attempt = 0; attempt <= policy_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(policy_.backoff_ms << (attempt - 1)));
        }
        rate_limit();
        ++counters_.service_calls;
        GeocodeResponse resp = client_.lookup(city, state);
        if (resp.transport_error) {
            last_error = resp.error;
            continue;
        }
        if (resp.candidates.empty()) {
            ++counters_.failures;
            diagnostics.push_back(
                {"geocode", 0, "no result for '" + city + ", " + state + "'"});
            return std::nullopt;
        }
        if (resp.candidates.size() > 1) {
            ++counters_.ambiguous;
            diagnostics.push_back({"geocode", 0,
                                   "ambiguous result for '" + city + ", " + state + "' (" +
                                       std::to_string(resp.candidates.size()) +
                                       " candidates); using first, flagged for review"});
        }
        GeoCache::Entry e;
        e.point = resp.candidates.front();
        e.source = "service";
        e.fetched_at = now_utc_iso();
        cache_.put(city, state, e);
        return e.point;
    }

    ++counters_.failures;
    diagnostics.push_back({"geocode", 0,
                           "service unreachable for '" + city + ", " + state +
                               "' after " + std::to_string(policy_.max_retries + 1) +
                               " attempts: " + last_error});
    return std::nullopt;
}

}  // namespace quotecross
