#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "quotecross/cluster.hpp"
#include "quotecross/date.hpp"
#include "quotecross/diagnostics.hpp"
#include "quotecross/geo.hpp"

namespace quotecross {

class Normalizer;

// One reported propaganda incident from the offline corpus.
struct OfflineEvent {
    std::string id;
    std::string quote_raw;
    std::string city;
    std::string state;  // 2-letter uppercase US state/territory code
    std::string description;
    Date date{};
    std::optional<GeoPoint> geo;
};

// One message from the online corpus, held at day granularity.
struct OnlinePost {
    std::string id;
    std::string text;
    std::string dataset;
    std::string platform;
    Date day{};
};

struct AnnotationRecord {
    std::string canonical_quote;  // loose normal form
    bool is_propaganda = false;
};

struct SourceManifestEntry {
    std::string platform;
    std::string dataset;
    std::optional<long> expected_count;
};

struct SourceManifest {
    std::vector<SourceManifestEntry> entries;
};

enum class InputFormat { Csv, Jsonl };

std::optional<InputFormat> parse_input_format(std::string_view s);
std::string_view input_format_name(InputFormat f);

template <typename T>
struct LoadResult {
    std::vector<T> records;
    Diagnostics diagnostics;
    std::size_t rows = 0;     // data rows seen (excluding a CSV header)
    std::size_t skipped = 0;  // rows dropped with a diagnostic
};

// Loads the offline corpus. Well-formed rows become events in input
// order; malformed rows are skipped with a line-numbered diagnostic.
// Unreadable files and unknown schemas are fatal.
//
// CSV schema: quote,city,state,event,timestamp. JSONL uses the same keys,
// one object per line. Row ids are assigned as e<row> in input order.
LoadResult<OfflineEvent> load_offline(const std::filesystem::path& path, InputFormat format);

// Online corpus loader. Schema: text,dataset,platform,timestamp.
// Timestamps may carry a time of day, which is truncated. Ids are p<row>.
LoadResult<OnlinePost> load_online(const std::filesystem::path& path, InputFormat format);

// Keeps the first occurrence of each (exact text, platform, day) group,
// preserving order.
std::vector<OnlinePost> dedup_posts(const std::vector<OnlinePost>& posts);

// Warnings for (platform, dataset) labels missing from the manifest and
// for expected-count mismatches.
Diagnostics manifest_warnings(const std::vector<OnlinePost>& posts,
                              const SourceManifest& manifest);

// CSV: platform,dataset,expected_count (blank allowed). Duplicate pairs
// and malformed rows are fatal.
SourceManifest load_source_manifest(const std::filesystem::path& path);

// CSV: canonical_quote,is_propaganda. Keys are re-normalized to loose
// form on load (a no-op for well-formed files); duplicates after
// normalization are fatal.
LoadResult<AnnotationRecord> load_annotations(const std::filesystem::path& path,
                                              const Normalizer& normalizer);

struct AnnotationOutcome {
    std::vector<QuoteCluster> kept;          // subsequence of the input
    std::vector<std::string> unannotated;    // cluster ids kept without an entry
    std::size_t annotated_true = 0;
    std::size_t annotated_false = 0;
    std::optional<double> ratio;             // annotated_true / annotated_total
};

// Drops clusters annotated as not-propaganda; clusters without an entry
// are kept and reported. The ratio is absent when nothing was annotated.
AnnotationOutcome apply_annotations(const std::vector<QuoteCluster>& clusters,
                                    const std::vector<AnnotationRecord>& annotations);

}  // namespace quotecross
