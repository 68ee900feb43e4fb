#include "quotecross/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "quotecross/csv.hpp"
#include "quotecross/errors.hpp"
#include "quotecross/normalize.hpp"
#include "quotecross/unicode.hpp"

namespace quotecross {

namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

bool is_state_code(std::string_view s) {
    return s.size() == 2 && s[0] >= 'A' && s[0] <= 'Z' && s[1] >= 'A' && s[1] <= 'Z';
}

std::string make_id(char prefix, std::size_t row) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%c%06zu", prefix, row);
    return buf;
}

std::ifstream open_or_fatal(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FatalError("cannot open input file: " + path.string());
    }
    return in;
}

// Maps required header names to column indexes; unknown columns are
// allowed and ignored. Missing required columns are fatal.
std::vector<std::size_t> map_header(const std::vector<std::string>& header,
                                    const std::vector<std::string_view>& required,
                                    const std::filesystem::path& path) {
    std::vector<std::size_t> indexes;
    for (std::string_view name : required) {
        auto it = std::find_if(header.begin(), header.end(),
                               [&](const std::string& h) { return trim(h) == name; });
        if (it == header.end()) {
            throw FatalError("missing required column '" + std::string(name) +
                             "' in " + path.string());
        }
        indexes.push_back(static_cast<std::size_t>(it - header.begin()));
    }
    return indexes;
}

// Extracts a required string value from a JSONL object; returns false
// with a reason when absent or not a string.
bool json_string(const json& obj, const char* key, std::string& out, std::string& reason) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        reason = std::string("missing key '") + key + "'";
        return false;
    }
    if (!it->is_string()) {
        reason = std::string("key '") + key + "' is not a string";
        return false;
    }
    out = it->get<std::string>();
    return true;
}

}  // namespace

std::optional<InputFormat> parse_input_format(std::string_view s) {
    if (s == "csv") return InputFormat::Csv;
    if (s == "jsonl") return InputFormat::Jsonl;
    return std::nullopt;
}

std::string_view input_format_name(InputFormat f) {
    return f == InputFormat::Csv ? "csv" : "jsonl";
}

namespace {

// Row-oriented reader shared by the corpus loaders. For CSV it validates
// the header; for JSONL it extracts the same keys. `handle` receives the
// column values and the 1-based line number and returns a skip reason or
// an empty string.
template <typename Handle>
void read_rows(const std::filesystem::path& path, InputFormat format,
               const std::vector<std::string_view>& columns, std::size_t& rows,
               std::size_t& skipped, Diagnostics& diagnostics, Handle&& handle) {
    std::ifstream in = open_or_fatal(path);
    const std::string fname = path.filename().string();

    auto skip = [&](std::size_t line, std::string reason) {
        ++skipped;
        diagnostics.push_back({fname, line, std::move(reason)});
    };

    if (format == InputFormat::Csv) {
        CsvReader reader(in);
        std::size_t line = 0;
        auto header = reader.next(line);
        if (!header) {
            diagnostics.push_back({fname, 0, "empty input file"});
            return;
        }
        const auto indexes = map_header(*header, columns, path);
        while (auto row = reader.next(line)) {
            // A single empty trailing field comes from a blank line.
            if (row->size() == 1 && (*row)[0].empty()) continue;
            ++rows;
            if (row->size() != header->size()) {
                skip(line, "expected " + std::to_string(header->size()) + " fields, got " +
                               std::to_string(row->size()));
                continue;
            }
            std::vector<std::string> values;
            values.reserve(indexes.size());
            for (std::size_t idx : indexes) values.push_back((*row)[idx]);
            std::string reason = handle(values, line);
            if (!reason.empty()) skip(line, std::move(reason));
        }
        if (rows == 0) diagnostics.push_back({fname, 0, "no data rows"});
        return;
    }

    std::string line_text;
    std::size_t line = 0;
    bool saw_content = false;
    while (std::getline(in, line_text)) {
        ++line;
        if (trim(line_text).empty()) continue;
        saw_content = true;
        ++rows;
        json obj = json::parse(line_text, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            skip(line, "invalid JSON object");
            continue;
        }
        std::vector<std::string> values(columns.size());
        std::string reason;
        bool ok = true;
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (!json_string(obj, std::string(columns[i]).c_str(), values[i], reason)) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            skip(line, std::move(reason));
            continue;
        }
        reason = handle(values, line);
        if (!reason.empty()) skip(line, std::move(reason));
    }
    if (!saw_content) diagnostics.push_back({fname, 0, "empty input file"});
}

}  // namespace

LoadResult<OfflineEvent> load_offline(const std::filesystem::path& path, InputFormat format) {
    LoadResult<OfflineEvent> result;
    read_rows(path, format, {"quote", "city", "state", "event", "timestamp"}, result.rows,
              result.skipped, result.diagnostics,
              [&](const std::vector<std::string>& v, std::size_t) -> std::string {
                  const std::string& quote = v[0];
                  if (trim(quote).empty()) return "empty quote";
                  std::string state = trim(v[2]);
                  if (!is_state_code(state)) return "state not a 2-letter uppercase code";
                  auto date = parse_timestamp_day(v[4]);
                  if (!date) return "invalid timestamp '" + v[4] + "'";
                  OfflineEvent ev;
                  ev.id = make_id('e', result.rows);
                  ev.quote_raw = quote;
                  ev.city = trim(v[1]);
                  ev.state = std::move(state);
                  ev.description = v[3];
                  ev.date = *date;
                  result.records.push_back(std::move(ev));
                  return {};
              });
    return result;
}

LoadResult<OnlinePost> load_online(const std::filesystem::path& path, InputFormat format) {
    LoadResult<OnlinePost> result;
    read_rows(path, format, {"text", "dataset", "platform", "timestamp"}, result.rows,
              result.skipped, result.diagnostics,
              [&](const std::vector<std::string>& v, std::size_t) -> std::string {
                  const std::string& text = v[0];
                  if (trim(text).empty()) return "empty text";
                  if (trim(v[1]).empty()) return "missing dataset";
                  if (trim(v[2]).empty()) return "missing platform";
                  auto day = parse_timestamp_day(v[3]);
                  if (!day) return "invalid timestamp '" + v[3] + "'";
                  OnlinePost post;
                  post.id = make_id('p', result.rows);
                  post.text = text;
                  post.dataset = trim(v[1]);
                  post.platform = trim(v[2]);
                  post.day = *day;
                  result.records.push_back(std::move(post));
                  return {};
              });
    return result;
}

std::vector<OnlinePost> dedup_posts(const std::vector<OnlinePost>& posts) {
    std::vector<OnlinePost> out;
    out.reserve(posts.size());
    std::unordered_set<std::string> seen;
    seen.reserve(posts.size() * 2);
    for (const OnlinePost& post : posts) {
        std::string key = post.text;
        key.push_back('\x1f');
        key += post.platform;
        key.push_back('\x1f');
        key += format_date(post.day);
        if (seen.insert(std::move(key)).second) {
            out.push_back(post);
        }
    }
    return out;
}

Diagnostics manifest_warnings(const std::vector<OnlinePost>& posts,
                              const SourceManifest& manifest) {
    Diagnostics out;
    std::map<std::pair<std::string, std::string>, long> counts;
    for (const OnlinePost& post : posts) {
        ++counts[{post.platform, post.dataset}];
    }
    std::map<std::pair<std::string, std::string>, std::optional<long>> declared;
    for (const SourceManifestEntry& e : manifest.entries) {
        declared[{e.platform, e.dataset}] = e.expected_count;
    }
    for (const auto& [pair, n] : counts) {
        auto it = declared.find(pair);
        if (it == declared.end()) {
            out.push_back({"manifest", 0,
                           "unknown source (" + pair.first + ", " + pair.second + "): " +
                               std::to_string(n) + " posts"});
        } else if (it->second && *it->second != n) {
            out.push_back({"manifest", 0,
                           "source (" + pair.first + ", " + pair.second + ") has " +
                               std::to_string(n) + " posts, expected " +
                               std::to_string(*it->second)});
        }
    }
    return out;
}

SourceManifest load_source_manifest(const std::filesystem::path& path) {
    std::ifstream in = open_or_fatal(path);
    CsvReader reader(in);
    std::size_t line = 0;
    auto header = reader.next(line);
    if (!header) throw FatalError("empty source manifest: " + path.string());
    const auto indexes = map_header(*header, {"platform", "dataset", "expected_count"}, path);

    SourceManifest manifest;
    std::unordered_set<std::string> seen;
    while (auto row = reader.next(line)) {
        if (row->size() == 1 && (*row)[0].empty()) continue;
        if (row->size() != header->size()) {
            throw FatalError(path.string() + ":" + std::to_string(line) +
                             ": malformed manifest row");
        }
        SourceManifestEntry entry;
        entry.platform = trim((*row)[indexes[0]]);
        entry.dataset = trim((*row)[indexes[1]]);
        std::string count = trim((*row)[indexes[2]]);
        if (!count.empty()) {
            try {
                entry.expected_count = std::stol(count);
            } catch (const std::exception&) {
                throw FatalError(path.string() + ":" + std::to_string(line) +
                                 ": expected_count is not an integer");
            }
        }
        if (!seen.insert(entry.platform + '\x1f' + entry.dataset).second) {
            throw FatalError(path.string() + ":" + std::to_string(line) +
                             ": duplicate manifest pair (" + entry.platform + ", " +
                             entry.dataset + ")");
        }
        manifest.entries.push_back(std::move(entry));
    }
    return manifest;
}

LoadResult<AnnotationRecord> load_annotations(const std::filesystem::path& path,
                                              const Normalizer& normalizer) {
    LoadResult<AnnotationRecord> result;
    std::ifstream in = open_or_fatal(path);
    const std::string fname = path.filename().string();
    CsvReader reader(in);
    std::size_t line = 0;
    auto header = reader.next(line);
    if (!header) {
        result.diagnostics.push_back({fname, 0, "empty annotation file"});
        return result;
    }
    const auto indexes = map_header(*header, {"canonical_quote", "is_propaganda"}, path);

    std::unordered_set<std::string> seen;
    while (auto row = reader.next(line)) {
        if (row->size() == 1 && (*row)[0].empty()) continue;
        ++result.rows;
        if (row->size() != header->size()) {
            ++result.skipped;
            result.diagnostics.push_back({fname, line, "malformed row"});
            continue;
        }
        const std::string& raw_key = (*row)[indexes[0]];
        std::string flag = trim((*row)[indexes[1]]);
        std::transform(flag.begin(), flag.end(), flag.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

        AnnotationRecord record;
        if (flag == "true" || flag == "1") {
            record.is_propaganda = true;
        } else if (flag == "false" || flag == "0") {
            record.is_propaganda = false;
        } else {
            ++result.skipped;
            result.diagnostics.push_back({fname, line, "is_propaganda must be true/false"});
            continue;
        }

        record.canonical_quote = normalizer.normalize(raw_key).loose_key;
        if (record.canonical_quote.empty()) {
            ++result.skipped;
            result.diagnostics.push_back({fname, line, "canonical_quote normalizes to empty"});
            continue;
        }
        if (record.canonical_quote != trim(raw_key)) {
            result.diagnostics.push_back(
                {fname, line, "canonical_quote was not in loose normal form; re-normalized"});
        }
        if (!seen.insert(record.canonical_quote).second) {
            throw FatalError(path.string() + ":" + std::to_string(line) +
                             ": duplicate annotation key '" + record.canonical_quote + "'");
        }
        result.records.push_back(std::move(record));
    }
    return result;
}

AnnotationOutcome apply_annotations(const std::vector<QuoteCluster>& clusters,
                                    const std::vector<AnnotationRecord>& annotations) {
    std::unordered_map<std::string, bool> lookup;
    lookup.reserve(annotations.size() * 2);
    for (const AnnotationRecord& a : annotations) {
        lookup.emplace(a.canonical_quote, a.is_propaganda);
    }

    AnnotationOutcome outcome;
    for (const QuoteCluster& cluster : clusters) {
        // A merged cluster carries several keys; one true entry keeps it.
        bool found = false;
        bool is_propaganda = false;
        for (const std::string& key : cluster.loose_keys) {
            auto it = lookup.find(key);
            if (it != lookup.end()) {
                found = true;
                is_propaganda = is_propaganda || it->second;
            }
        }
        if (!found) {
            outcome.unannotated.push_back(cluster.cluster_id);
            outcome.kept.push_back(cluster);
            continue;
        }
        if (is_propaganda) {
            ++outcome.annotated_true;
            outcome.kept.push_back(cluster);
        } else {
            ++outcome.annotated_false;
        }
    }
    const std::size_t annotated_total = outcome.annotated_true + outcome.annotated_false;
    if (annotated_total > 0) {
        outcome.ratio = static_cast<double>(outcome.annotated_true) /
                        static_cast<double>(annotated_total);
    }
    return outcome;
}

}  // namespace quotecross
