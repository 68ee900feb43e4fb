#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "quotecross/corpus.hpp"
#include "quotecross/date.hpp"
#include "quotecross/geo.hpp"
#include "quotecross/geocode.hpp"

namespace quotecross {

struct GeocoderSettings {
    std::string base_url;  // empty: offline mode, cache/overrides only
    double rate_limit_per_sec = 1.0;
    int max_retries = 3;
    int backoff_ms = 250;
    int timeout_ms = 5000;
};

// Effective run settings. Paths are resolved against the config file's
// directory and validated up front; the raw config bytes are kept so the
// output directory can carry a verbatim copy.
struct RunConfig {
    std::filesystem::path config_path;
    std::string raw_bytes;     // verbatim config file content
    std::string config_digest; // sha256 of raw_bytes

    std::filesystem::path offline_path;
    InputFormat offline_format = InputFormat::Csv;
    std::filesystem::path online_path;
    InputFormat online_format = InputFormat::Jsonl;
    std::filesystem::path stopwords_path;
    std::optional<std::filesystem::path> annotations_path;
    std::optional<std::filesystem::path> merges_path;
    std::optional<std::filesystem::path> manifest_path;
    std::optional<std::filesystem::path> overrides_path;
    std::filesystem::path geocache_path;

    GeocoderSettings geocoder;
    std::optional<Date> window_start;
    std::optional<Date> window_end;
    GyrationMode gyration_mode = GyrationMode::Planar;
    double radius_quantile = 0.75;
    double lifespan_quantile = 0.75;
    std::optional<GeoPoint> reference_point;
    int top_k = 10;
    std::uint64_t seed = 0;   // reserved for report sampling
    unsigned threads = 0;     // 0: hardware concurrency
    std::filesystem::path out_dir;
};

// Command-line settings that take precedence over the config file.
struct CliOverrides {
    std::optional<std::string> window_start;
    std::optional<std::string> window_end;
    std::optional<std::string> gyration_mode;
    std::optional<int> top_k;
    std::optional<std::string> out_dir;
};

// Parses and validates the JSON config, applies QUOTECROSS_GEOCODER_URL /
// QUOTECROSS_GEOCODER_RPS environment overrides and then CLI overrides.
// Unknown keys, missing inputs, and inconsistent settings are ConfigErrors.
RunConfig load_config(const std::filesystem::path& path, const CliOverrides& overrides);

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitMissingArtifact = 3;
inline constexpr int kExitPartial = 4;

// Staged pipeline over a persisted artifact directory. Each command
// reads its inputs from the stage before it and can therefore run in a
// separate process. Commands return kExitOk, or kExitPartial when the
// stage completed but emitted diagnostics; configuration and missing-
// artifact problems are thrown (ConfigError / MissingArtifactError).
class Pipeline {
  public:
    explicit Pipeline(RunConfig config);

    int ingest();
    int match();
    // `client` overrides the HTTP geocoder (tests inject stubs); by
    // default a client is built from config when the cache misses.
    int geo(GeocoderClient* client = nullptr);
    int temporal();
    int report();
    int run_all(GeocoderClient* client = nullptr);

    const RunConfig& config() const { return config_; }

  private:
    RunConfig config_;
};

}  // namespace quotecross
