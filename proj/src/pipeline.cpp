#include "quotecross/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "json.hpp"
#include "quotecross/csv.hpp"
#include "quotecross/errors.hpp"
#include "quotecross/match.hpp"
#include "quotecross/normalize.hpp"
#include "quotecross/sha256.hpp"
#include "quotecross/temporal.hpp"
#include "quotecross/unicode.hpp"

namespace quotecross {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---- config parsing -------------------------------------------------------

void require_known_keys(const json& obj, const char* where,
                        std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ConfigError(std::string("unknown config key '") + it.key() + "' in " + where);
        }
    }
}

fs::path resolve_path(const fs::path& base_dir, const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
}

void require_input_file(const fs::path& p, const char* what) {
    if (!fs::exists(p)) {
        throw ConfigError(std::string(what) + " not found: " + p.string());
    }
    if (fs::is_directory(p)) {
        throw ConfigError(std::string(what) + " is a directory: " + p.string());
    }
}

double json_number(const json& v, const char* what) {
    if (!v.is_number()) throw ConfigError(std::string(what) + " must be a number");
    return v.get<double>();
}

std::string json_string_cfg(const json& v, const char* what) {
    if (!v.is_string()) throw ConfigError(std::string(what) + " must be a string");
    return v.get<std::string>();
}

Date parse_config_date(const std::string& s, const char* what) {
    auto d = parse_date(s);
    if (!d) throw ConfigError(std::string(what) + " is not a valid ISO date: '" + s + "'");
    return *d;
}

// ---- artifact locations ---------------------------------------------------

fs::path corpus_dir(const RunConfig& c) { return c.out_dir / "corpus"; }
fs::path match_dir(const RunConfig& c) { return c.out_dir / "match"; }
fs::path geo_dir(const RunConfig& c) { return c.out_dir / "geo"; }
fs::path temporal_dir(const RunConfig& c) { return c.out_dir / "temporal"; }
fs::path report_dir(const RunConfig& c) { return c.out_dir / "report"; }

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FatalError("cannot write artifact: " + path.string());
    out << content;
    if (!out) throw FatalError("write failed: " + path.string());
}

std::ifstream open_artifact(const fs::path& path, const char* produced_by) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw MissingArtifactError("missing artifact " + path.string() + "; run `quotecross " +
                                   produced_by + "` first");
    }
    return in;
}

void write_json_file(const fs::path& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

json read_json_artifact(const fs::path& path, const char* produced_by) {
    std::ifstream in = open_artifact(path, produced_by);
    std::stringstream ss;
    ss << in.rdbuf();
    json j = json::parse(ss.str(), nullptr, false);
    if (j.is_discarded()) throw FatalError("corrupt artifact (bad JSON): " + path.string());
    return j;
}

void write_diagnostics_file(const fs::path& dir, const Diagnostics& diags) {
    std::string body;
    for (const Diagnostic& d : diags) {
        body += d.to_string();
        body += '\n';
        std::cerr << d.to_string() << '\n';
    }
    write_text(dir / "diagnostics.txt", body);
}

void check_reconcile(bool ok, const std::string& what) {
    if (!ok) throw FatalError("stage count reconciliation failed: " + what);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string plot_header(const RunConfig& cfg, const std::string& schema) {
    return "# schema: quotecross." + schema + " v1\n# config_digest: " + cfg.config_digest +
           "\n";
}

// Copy of the config file exactly as given, so a run directory is
// self-describing.
void write_config_copy(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    write_text(cfg.out_dir / "config.json", cfg.raw_bytes);
}

// ---- record (de)serialization ----------------------------------------------

json event_to_json(const OfflineEvent& e) {
    json j;
    j["id"] = e.id;
    j["quote"] = e.quote_raw;
    j["city"] = e.city;
    j["state"] = e.state;
    j["event"] = e.description;
    j["date"] = format_date(e.date);
    return j;
}

json post_to_json(const OnlinePost& p) {
    json j;
    j["id"] = p.id;
    j["text"] = p.text;
    j["dataset"] = p.dataset;
    j["platform"] = p.platform;
    j["day"] = format_date(p.day);
    return j;
}

Date require_json_date(const json& j, const char* key, const fs::path& path) {
    if (!j.contains(key) || !j[key].is_string()) {
        throw FatalError("corrupt artifact (missing " + std::string(key) + "): " + path.string());
    }
    auto d = parse_date(j[key].get<std::string>());
    if (!d) throw FatalError("corrupt artifact (bad date): " + path.string());
    return *d;
}

std::string require_json_string(const json& j, const char* key, const fs::path& path) {
    if (!j.contains(key) || !j[key].is_string()) {
        throw FatalError("corrupt artifact (missing " + std::string(key) + "): " + path.string());
    }
    return j[key].get<std::string>();
}

std::vector<OfflineEvent> load_event_artifact(const fs::path& path) {
    std::ifstream in = open_artifact(path, "ingest");
    std::vector<OfflineEvent> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw FatalError("corrupt artifact: " + path.string());
        OfflineEvent e;
        e.id = require_json_string(j, "id", path);
        e.quote_raw = require_json_string(j, "quote", path);
        e.city = require_json_string(j, "city", path);
        e.state = require_json_string(j, "state", path);
        e.description = require_json_string(j, "event", path);
        e.date = require_json_date(j, "date", path);
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<OnlinePost> load_post_artifact(const fs::path& path) {
    std::ifstream in = open_artifact(path, "ingest");
    std::vector<OnlinePost> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw FatalError("corrupt artifact: " + path.string());
        OnlinePost p;
        p.id = require_json_string(j, "id", path);
        p.text = require_json_string(j, "text", path);
        p.dataset = require_json_string(j, "dataset", path);
        p.platform = require_json_string(j, "platform", path);
        p.day = require_json_date(j, "day", path);
        out.push_back(std::move(p));
    }
    return out;
}

json cluster_to_json(const QuoteCluster& c) {
    json j;
    j["cluster_id"] = c.cluster_id;
    j["canonical"] = c.canonical;
    j["loose_keys"] = c.loose_keys;
    j["variants"] = c.variants;
    json offline = json::array();
    for (const auto& occ : c.offline_occurrences) {
        json o;
        o["event_id"] = occ.event_id;
        o["date"] = format_date(occ.date);
        offline.push_back(std::move(o));
    }
    j["offline"] = std::move(offline);
    json online = json::array();
    for (const auto& m : c.online_mentions) {
        json o;
        o["post_id"] = m.post_id;
        o["date"] = format_date(m.date);
        o["platform"] = m.platform;
        o["kind"] = std::string(match_kind_name(m.kind));
        online.push_back(std::move(o));
    }
    j["online"] = std::move(online);
    return j;
}

MatchKind parse_match_kind_or_throw(const std::string& s, const fs::path& path) {
    if (s == "exact") return MatchKind::Exact;
    if (s == "loose") return MatchKind::Loose;
    throw FatalError("corrupt artifact (bad match kind '" + s + "'): " + path.string());
}

void save_clusters(const fs::path& path, const std::vector<QuoteCluster>& clusters) {
    std::string body;
    for (const QuoteCluster& c : clusters) {
        body += cluster_to_json(c).dump();
        body += '\n';
    }
    write_text(path, body);
}

std::vector<QuoteCluster> load_clusters(const fs::path& path, const char* produced_by) {
    std::ifstream in = open_artifact(path, produced_by);
    std::vector<QuoteCluster> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw FatalError("corrupt artifact: " + path.string());
        QuoteCluster c;
        c.cluster_id = require_json_string(j, "cluster_id", path);
        c.canonical = require_json_string(j, "canonical", path);
        for (const auto& k : j.value("loose_keys", json::array())) {
            c.loose_keys.push_back(k.get<std::string>());
        }
        for (const auto& v : j.value("variants", json::array())) {
            c.variants.push_back(v.get<std::string>());
        }
        for (const auto& o : j.value("offline", json::array())) {
            OfflineOccurrence occ;
            occ.event_id = require_json_string(o, "event_id", path);
            occ.date = require_json_date(o, "date", path);
            c.offline_occurrences.push_back(std::move(occ));
        }
        for (const auto& o : j.value("online", json::array())) {
            OnlineMention m;
            m.post_id = require_json_string(o, "post_id", path);
            m.date = require_json_date(o, "date", path);
            m.platform = require_json_string(o, "platform", path);
            m.kind = parse_match_kind_or_throw(require_json_string(o, "kind", path), path);
            c.online_mentions.push_back(std::move(m));
        }
        out.push_back(std::move(c));
    }
    return out;
}

// Service stand-in when no geocoder endpoint is configured: every lookup
// is a definitive miss.
class NoServiceClient : public GeocoderClient {
  public:
    GeocodeResponse lookup(const std::string&, const std::string&) override {
        GeocodeResponse resp;
        resp.transport_error = true;
        resp.error = "no geocoder endpoint configured";
        return resp;
    }
};

}  // namespace

// ---- load_config ------------------------------------------------------------

RunConfig load_config(const fs::path& path, const CliOverrides& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();

    RunConfig cfg;
    cfg.config_path = path;
    cfg.raw_bytes = ss.str();
    cfg.config_digest = sha256_hex(cfg.raw_bytes);

    json j = json::parse(cfg.raw_bytes, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ConfigError("config file is not a JSON object: " + path.string());
    }
    require_known_keys(j, "config root",
                       {"offline", "online", "stopwords", "annotations", "merges", "manifest",
                        "overrides", "geocache", "geocoder", "window", "gyration_mode",
                        "region_quantiles", "reference_point", "top_k", "seed", "threads",
                        "out_dir"});

    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");

    // A corpus entry is either "file.csv" or {"path": ..., "format": ...}.
    auto corpus_input = [&](const char* key, InputFormat def, fs::path& out_path,
                            InputFormat& out_format) {
        if (!j.contains(key)) throw ConfigError(std::string("config is missing '") + key + "'");
        const json& v = j[key];
        out_format = def;
        if (v.is_string()) {
            out_path = resolve_path(base, v.get<std::string>());
        } else if (v.is_object()) {
            require_known_keys(v, key, {"path", "format"});
            if (!v.contains("path")) {
                throw ConfigError(std::string(key) + " needs a 'path'");
            }
            out_path = resolve_path(base, json_string_cfg(v["path"], "path"));
            if (v.contains("format")) {
                auto f = parse_input_format(json_string_cfg(v["format"], "format"));
                if (!f) {
                    throw ConfigError(std::string("bad format for '") + key +
                                      "': expected csv or jsonl");
                }
                out_format = *f;
            }
        } else {
            throw ConfigError(std::string("config '") + key + "' must be a path or object");
        }
    };
    corpus_input("offline", InputFormat::Csv, cfg.offline_path, cfg.offline_format);
    corpus_input("online", InputFormat::Jsonl, cfg.online_path, cfg.online_format);
    require_input_file(cfg.offline_path, "offline corpus");
    require_input_file(cfg.online_path, "online corpus");

    if (!j.contains("stopwords")) throw ConfigError("config is missing 'stopwords'");
    cfg.stopwords_path = resolve_path(base, json_string_cfg(j["stopwords"], "stopwords"));
    require_input_file(cfg.stopwords_path, "stopword list");

    auto optional_input = [&](const char* key, const char* what) -> std::optional<fs::path> {
        if (!j.contains(key)) return std::nullopt;
        fs::path p = resolve_path(base, json_string_cfg(j[key], key));
        require_input_file(p, what);
        return p;
    };
    cfg.annotations_path = optional_input("annotations", "annotation file");
    cfg.merges_path = optional_input("merges", "merge list");
    cfg.manifest_path = optional_input("manifest", "source manifest");
    cfg.overrides_path = optional_input("overrides", "override file");

    cfg.geocache_path = j.contains("geocache")
                            ? resolve_path(base, json_string_cfg(j["geocache"], "geocache"))
                            : base / "geocache.jsonl";

    if (j.contains("geocoder")) {
        const json& g = j["geocoder"];
        if (!g.is_object()) throw ConfigError("config 'geocoder' must be an object");
        require_known_keys(g, "geocoder",
                           {"base_url", "rate_limit_per_sec", "max_retries", "backoff_ms",
                            "timeout_ms"});
        if (g.contains("base_url")) {
            cfg.geocoder.base_url = json_string_cfg(g["base_url"], "geocoder.base_url");
        }
        if (g.contains("rate_limit_per_sec")) {
            cfg.geocoder.rate_limit_per_sec =
                json_number(g["rate_limit_per_sec"], "geocoder.rate_limit_per_sec");
            if (cfg.geocoder.rate_limit_per_sec < 0) {
                throw ConfigError("geocoder.rate_limit_per_sec must be >= 0");
            }
        }
        if (g.contains("max_retries")) {
            cfg.geocoder.max_retries =
                static_cast<int>(json_number(g["max_retries"], "geocoder.max_retries"));
            if (cfg.geocoder.max_retries < 0) throw ConfigError("geocoder.max_retries must be >= 0");
        }
        if (g.contains("backoff_ms")) {
            cfg.geocoder.backoff_ms =
                static_cast<int>(json_number(g["backoff_ms"], "geocoder.backoff_ms"));
            if (cfg.geocoder.backoff_ms < 0) throw ConfigError("geocoder.backoff_ms must be >= 0");
        }
        if (g.contains("timeout_ms")) {
            cfg.geocoder.timeout_ms =
                static_cast<int>(json_number(g["timeout_ms"], "geocoder.timeout_ms"));
            if (cfg.geocoder.timeout_ms <= 0) throw ConfigError("geocoder.timeout_ms must be > 0");
        }
    }
    if (const char* url = std::getenv("QUOTECROSS_GEOCODER_URL")) {
        cfg.geocoder.base_url = url;
    }
    if (const char* rps = std::getenv("QUOTECROSS_GEOCODER_RPS")) {
        try {
            std::size_t pos = 0;
            cfg.geocoder.rate_limit_per_sec = std::stod(rps, &pos);
            if (pos != std::string(rps).size()) throw std::invalid_argument("trailing junk");
        } catch (const std::exception&) {
            throw ConfigError(std::string("QUOTECROSS_GEOCODER_RPS is not a number: '") + rps +
                              "'");
        }
        if (cfg.geocoder.rate_limit_per_sec < 0) {
            throw ConfigError("QUOTECROSS_GEOCODER_RPS must be >= 0");
        }
    }

    if (j.contains("window")) {
        const json& w = j["window"];
        if (!w.is_object()) throw ConfigError("config 'window' must be an object");
        require_known_keys(w, "window", {"start", "end"});
        if (w.contains("start")) {
            cfg.window_start =
                parse_config_date(json_string_cfg(w["start"], "window.start"), "window.start");
        }
        if (w.contains("end")) {
            cfg.window_end =
                parse_config_date(json_string_cfg(w["end"], "window.end"), "window.end");
        }
    }

    if (j.contains("gyration_mode")) {
        auto m = parse_gyration_mode(json_string_cfg(j["gyration_mode"], "gyration_mode"));
        if (!m) throw ConfigError("gyration_mode must be 'planar' or 'great_circle'");
        cfg.gyration_mode = *m;
    }

    if (j.contains("region_quantiles")) {
        const json& q = j["region_quantiles"];
        if (!q.is_object()) throw ConfigError("config 'region_quantiles' must be an object");
        require_known_keys(q, "region_quantiles", {"radius", "lifespan"});
        if (q.contains("radius")) {
            cfg.radius_quantile = json_number(q["radius"], "region_quantiles.radius");
        }
        if (q.contains("lifespan")) {
            cfg.lifespan_quantile = json_number(q["lifespan"], "region_quantiles.lifespan");
        }
        if (cfg.radius_quantile < 0 || cfg.radius_quantile > 1 || cfg.lifespan_quantile < 0 ||
            cfg.lifespan_quantile > 1) {
            throw ConfigError("region quantiles must lie in [0, 1]");
        }
    }

    if (j.contains("reference_point")) {
        const json& r = j["reference_point"];
        if (!r.is_object() || !r.contains("lat") || !r.contains("lon")) {
            throw ConfigError("reference_point needs 'lat' and 'lon'");
        }
        require_known_keys(r, "reference_point", {"lat", "lon"});
        auto p = GeoPoint::checked(json_number(r["lat"], "reference_point.lat"),
                                   json_number(r["lon"], "reference_point.lon"));
        if (!p) throw ConfigError("reference_point is out of range");
        cfg.reference_point = *p;
    }

    if (j.contains("top_k")) {
        cfg.top_k = static_cast<int>(json_number(j["top_k"], "top_k"));
    }
    if (j.contains("seed")) {
        cfg.seed = static_cast<std::uint64_t>(json_number(j["seed"], "seed"));
    }
    if (j.contains("threads")) {
        const double t = json_number(j["threads"], "threads");
        if (t < 0) throw ConfigError("threads must be >= 0");
        cfg.threads = static_cast<unsigned>(t);
    }
    if (j.contains("out_dir")) {
        cfg.out_dir = resolve_path(base, json_string_cfg(j["out_dir"], "out_dir"));
    }

    // CLI flags win over both the file and the environment.
    if (overrides.window_start) {
        cfg.window_start = parse_config_date(*overrides.window_start, "--window-start");
    }
    if (overrides.window_end) {
        cfg.window_end = parse_config_date(*overrides.window_end, "--window-end");
    }
    if (overrides.gyration_mode) {
        auto m = parse_gyration_mode(*overrides.gyration_mode);
        if (!m) throw ConfigError("--gyration-mode must be 'planar' or 'great_circle'");
        cfg.gyration_mode = *m;
    }
    if (overrides.top_k) cfg.top_k = *overrides.top_k;
    if (overrides.out_dir) cfg.out_dir = fs::path(*overrides.out_dir);

    if (cfg.top_k < 1) throw ConfigError("top_k must be >= 1");
    if (cfg.window_start.has_value() != cfg.window_end.has_value()) {
        throw ConfigError("analysis window needs both a start and an end");
    }
    if (cfg.window_start && *cfg.window_start > *cfg.window_end) {
        throw ConfigError("analysis window is inverted: start " + format_date(*cfg.window_start) +
                          " is after end " + format_date(*cfg.window_end));
    }
    if (cfg.out_dir.empty()) {
        throw ConfigError("no output directory: set 'out_dir' in the config or pass --out-dir");
    }
    return cfg;
}

// ---- pipeline stages ---------------------------------------------------------

Pipeline::Pipeline(RunConfig config) : config_(std::move(config)) {}

int Pipeline::ingest() {
    write_config_copy(config_);
    const fs::path dir = corpus_dir(config_);
    fs::create_directories(dir);

    LoadResult<OfflineEvent> off = load_offline(config_.offline_path, config_.offline_format);
    LoadResult<OnlinePost> on = load_online(config_.online_path, config_.online_format);
    std::vector<OnlinePost> posts = dedup_posts(on.records);

    Diagnostics diags = off.diagnostics;
    diags.insert(diags.end(), on.diagnostics.begin(), on.diagnostics.end());
    if (config_.manifest_path) {
        SourceManifest manifest = load_source_manifest(*config_.manifest_path);
        Diagnostics warns = manifest_warnings(posts, manifest);
        diags.insert(diags.end(), warns.begin(), warns.end());
    }

    std::string events_body;
    for (const OfflineEvent& e : off.records) {
        events_body += event_to_json(e).dump();
        events_body += '\n';
    }
    write_text(dir / "offline_events.jsonl", events_body);

    std::string posts_body;
    for (const OnlinePost& p : posts) {
        posts_body += post_to_json(p).dump();
        posts_body += '\n';
    }
    write_text(dir / "online_posts.jsonl", posts_body);

    json counts;
    counts["offline"]["rows"] = off.rows;
    counts["offline"]["loaded"] = off.records.size();
    counts["offline"]["skipped"] = off.skipped;
    counts["online"]["rows"] = on.rows;
    counts["online"]["loaded"] = on.records.size();
    counts["online"]["skipped"] = on.skipped;
    counts["online"]["after_dedup"] = posts.size();
    counts["online"]["duplicates_removed"] = on.records.size() - posts.size();
    counts["diagnostics"] = diags.size();
    write_json_file(dir / "counts.json", counts);
    write_diagnostics_file(dir, diags);

    check_reconcile(off.rows == off.records.size() + off.skipped, "offline rows");
    check_reconcile(on.rows == on.records.size() + on.skipped, "online rows");
    check_reconcile(posts.size() <= on.records.size(), "dedup grew the corpus");

    std::cout << "ingest: " << off.records.size() << " events, " << posts.size()
              << " posts after dedup (" << diags.size() << " diagnostics)\n";
    return diags.empty() ? kExitOk : kExitPartial;
}

int Pipeline::match() {
    write_config_copy(config_);
    const fs::path dir = match_dir(config_);
    fs::create_directories(dir);

    std::vector<OfflineEvent> events =
        load_event_artifact(corpus_dir(config_) / "offline_events.jsonl");
    std::vector<OnlinePost> posts = load_post_artifact(corpus_dir(config_) / "online_posts.jsonl");

    StopwordList stopwords = StopwordList::load(config_.stopwords_path);
    const std::string stopword_version = stopwords.version;
    Normalizer normalizer(std::move(stopwords));

    Diagnostics diags;

    ClusterResult offline_result = cluster_quotes(events, normalizer);
    const std::size_t clusters_initial = offline_result.clusters.size();

    std::vector<QuoteCluster> clusters = std::move(offline_result.clusters);
    std::size_t merges_applied = 0;
    if (config_.merges_path) {
        auto pairs = load_merge_pairs(*config_.merges_path);
        const std::size_t before = clusters.size();
        clusters = apply_manual_merges(std::move(clusters), pairs, diags);
        merges_applied = before - clusters.size();
    }

    AnnotationOutcome outcome;
    bool annotations_applied = false;
    if (config_.annotations_path) {
        LoadResult<AnnotationRecord> ann = load_annotations(*config_.annotations_path, normalizer);
        diags.insert(diags.end(), ann.diagnostics.begin(), ann.diagnostics.end());
        outcome = apply_annotations(clusters, ann.records);
        annotations_applied = true;
    } else {
        outcome.kept = clusters;
        for (const QuoteCluster& c : clusters) outcome.unannotated.push_back(c.cluster_id);
    }
    std::vector<QuoteCluster> kept = std::move(outcome.kept);

    MentionStats mention_stats =
        find_online_mentions(kept, posts, normalizer, config_.threads);

    ClusterResult online_result = cluster_online(posts, normalizer);

    save_clusters(dir / "clusters.jsonl", kept);
    save_clusters(dir / "online_clusters.jsonl", online_result.clusters);

    std::string rejected_body;
    for (const RejectedText& r : offline_result.rejected) {
        json o;
        o["id"] = r.id;
        o["source"] = "offline";
        o["text"] = r.text;
        rejected_body += o.dump();
        rejected_body += '\n';
    }
    for (const RejectedText& r : online_result.rejected) {
        json o;
        o["id"] = r.id;
        o["source"] = "online";
        o["text"] = r.text;
        rejected_body += o.dump();
        rejected_body += '\n';
    }
    write_text(dir / "rejected.jsonl", rejected_body);

    json counts;
    counts["offline_clusters"]["initial"] = clusters_initial;
    counts["offline_clusters"]["merges_applied"] = merges_applied;
    counts["offline_clusters"]["after_merges"] = clusters.size();
    counts["offline_clusters"]["kept"] = kept.size();
    counts["offline_clusters"]["rejected_quotes"] = offline_result.rejected.size();
    counts["annotation"]["applied"] = annotations_applied;
    counts["annotation"]["annotated_true"] = outcome.annotated_true;
    counts["annotation"]["annotated_false"] = outcome.annotated_false;
    counts["annotation"]["unannotated"] = outcome.unannotated.size();
    if (outcome.ratio) {
        counts["annotation"]["ratio"] = *outcome.ratio;
    }
    counts["online_clusters"]["count"] = online_result.clusters.size();
    counts["online_clusters"]["rejected_posts"] = online_result.rejected.size();
    counts["mentions"]["exact_posts"] = mention_stats.exact_posts;
    counts["mentions"]["loose_only_posts"] = mention_stats.loose_only_posts;
    counts["mentions"]["total_posts"] = mention_stats.total_posts;
    counts["mentions"]["mention_pairs"] = mention_stats.mention_pairs;
    counts["mentions"]["exact_pairs"] = mention_stats.exact_pairs;
    counts["mentions"]["loose_pairs"] = mention_stats.loose_pairs;
    counts["stopwords_version"] = stopword_version;
    counts["diagnostics"] = diags.size();
    write_json_file(dir / "counts.json", counts);
    write_diagnostics_file(dir, diags);

    std::size_t clustered_events = offline_result.rejected.size();
    for (const QuoteCluster& c : clusters) clustered_events += c.offline_count();
    check_reconcile(clustered_events == events.size(), "offline events vs clusters");
    check_reconcile(mention_stats.total_posts ==
                        mention_stats.exact_posts + mention_stats.loose_only_posts,
                    "mention post tiers");
    check_reconcile(mention_stats.mention_pairs ==
                        mention_stats.exact_pairs + mention_stats.loose_pairs,
                    "mention pair tiers");
    std::size_t recorded_pairs = 0;
    for (const QuoteCluster& c : kept) recorded_pairs += c.online_count();
    check_reconcile(recorded_pairs == mention_stats.mention_pairs, "recorded mention pairs");
    check_reconcile(outcome.annotated_true + outcome.unannotated.size() == kept.size(),
                    "kept clusters vs annotation outcome");

    std::cout << "match: " << kept.size() << " clusters kept, " << mention_stats.mention_pairs
              << " mention pairs across " << mention_stats.total_posts << " posts ("
              << diags.size() << " diagnostics)\n";
    return diags.empty() ? kExitOk : kExitPartial;
}

int Pipeline::geo(GeocoderClient* client) {
    write_config_copy(config_);
    const fs::path dir = geo_dir(config_);
    fs::create_directories(dir);

    std::vector<QuoteCluster> clusters = load_clusters(match_dir(config_) / "clusters.jsonl",
                                                       "match");
    std::vector<OfflineEvent> events =
        load_event_artifact(corpus_dir(config_) / "offline_events.jsonl");
    std::map<std::string, const OfflineEvent*> events_by_id;
    for (const OfflineEvent& e : events) events_by_id[e.id] = &e;

    GeoCache cache = GeoCache::load(config_.geocache_path);
    GeoCache overrides =
        config_.overrides_path ? load_overrides(*config_.overrides_path) : GeoCache();

    std::unique_ptr<GeocoderClient> fallback;
    if (client == nullptr) {
        if (config_.geocoder.base_url.empty()) {
            fallback = std::make_unique<NoServiceClient>();
        } else {
            fallback = std::make_unique<HttpGeocoderClient>(config_.geocoder.base_url,
                                                            config_.geocoder.timeout_ms);
        }
    }
    GeocoderPolicy policy;
    policy.rate_limit_per_sec = config_.geocoder.rate_limit_per_sec;
    policy.max_retries = config_.geocoder.max_retries;
    policy.backoff_ms = config_.geocoder.backoff_ms;
    // A run without an endpoint shouldn't spin through retries per miss.
    if (client == nullptr && config_.geocoder.base_url.empty()) {
        policy.max_retries = 0;
        policy.backoff_ms = 0;
    }
    Geocoder geocoder(cache, overrides, client ? *client : *fallback, policy);

    Diagnostics diags;
    // Each distinct location is resolved once per run, in first-use order.
    std::map<std::string, std::optional<GeoPoint>> resolved;

    std::string gyration_body;
    std::string excluded_body;
    std::string points_csv = plot_header(config_, "map_points") +
                             "cluster_id,event_id,date,lat,lon\n";
    std::string centroids_csv = plot_header(config_, "map_centroids") +
                                "cluster_id,lat,lon,radius,units,offline_count\n";
    const std::string units =
        config_.gyration_mode == GyrationMode::Planar ? "degrees" : "km";

    std::vector<WeightedCentroid> weighted;
    std::size_t events_resolved = 0;
    std::size_t events_unresolved = 0;
    std::size_t clusters_with_geo = 0;
    std::size_t clusters_excluded = 0;

    for (const QuoteCluster& c : clusters) {
        std::vector<GeoPoint> points;
        for (const OfflineOccurrence& occ : c.offline_occurrences) {
            auto ev_it = events_by_id.find(occ.event_id);
            if (ev_it == events_by_id.end()) {
                throw FatalError("artifact mismatch: cluster references unknown event " +
                                 occ.event_id + "; rerun ingest and match");
            }
            const OfflineEvent& ev = *ev_it->second;
            const std::string key = GeoCache::key(ev.city, ev.state);
            auto it = resolved.find(key);
            if (it == resolved.end()) {
                it = resolved.emplace(key, geocoder.resolve(ev.city, ev.state, diags)).first;
            }
            if (it->second) {
                ++events_resolved;
                points.push_back(*it->second);
                points_csv += csv_join({c.cluster_id, ev.id, format_date(occ.date),
                                        fmt_double(it->second->lat),
                                        fmt_double(it->second->lon)});
                points_csv += '\n';
            } else {
                ++events_unresolved;
                diags.push_back({"geo", 0,
                                 "event " + ev.id + " excluded from spatial analysis: '" +
                                     ev.city + ", " + ev.state + "' unresolved"});
            }
        }
        if (points.empty()) {
            ++clusters_excluded;
            json ex;
            ex["cluster_id"] = c.cluster_id;
            ex["reason"] = "no resolvable locations";
            excluded_body += ex.dump();
            excluded_body += '\n';
            continue;
        }
        ++clusters_with_geo;
        const GeoPoint center = centroid(points);
        const double radius = radius_of_gyration(points, config_.gyration_mode);
        json g;
        g["cluster_id"] = c.cluster_id;
        g["n"] = points.size();
        g["center_lat"] = center.lat;
        g["center_lon"] = center.lon;
        g["radius"] = radius;
        g["units"] = units;
        g["mode"] = std::string(gyration_mode_name(config_.gyration_mode));
        gyration_body += g.dump();
        gyration_body += '\n';
        centroids_csv += csv_join({c.cluster_id, fmt_double(center.lat), fmt_double(center.lon),
                                   fmt_double(radius), units,
                                   std::to_string(c.offline_count())});
        centroids_csv += '\n';
        weighted.push_back({center, points.size()});
    }

    write_text(dir / "gyration.jsonl", gyration_body);
    write_text(dir / "excluded.jsonl", excluded_body);
    write_text(dir / "map_points.csv", points_csv);
    write_text(dir / "map_centroids.csv", centroids_csv);

    json center_json;
    if (!weighted.empty()) {
        const GeoPoint center = propaganda_center(weighted);
        center_json["center"]["lat"] = center.lat;
        center_json["center"]["lon"] = center.lon;
        if (config_.reference_point) {
            DirectionalSummary cmp = compare_to_reference(center, *config_.reference_point);
            center_json["reference_comparison"]["reference"]["lat"] =
                config_.reference_point->lat;
            center_json["reference_comparison"]["reference"]["lon"] =
                config_.reference_point->lon;
            center_json["reference_comparison"]["dlat"] = cmp.dlat;
            center_json["reference_comparison"]["dlon"] = cmp.dlon;
            center_json["reference_comparison"]["quadrant"] = std::string(quadrant_name(cmp.quadrant));
        }
    } else {
        center_json["center"] = nullptr;
    }
    center_json["clusters_with_geo"] = clusters_with_geo;
    center_json["points"] = events_resolved;
    write_json_file(dir / "center.json", center_json);

    if (cache.dirty()) cache.save(config_.geocache_path);

    const GeocodeCounters& gc = geocoder.counters();
    json counts;
    counts["events"]["total"] = events_resolved + events_unresolved;
    counts["events"]["resolved"] = events_resolved;
    counts["events"]["unresolved"] = events_unresolved;
    counts["clusters"]["with_geo"] = clusters_with_geo;
    counts["clusters"]["excluded"] = clusters_excluded;
    counts["geocoder"]["cache_hits"] = gc.cache_hits;
    counts["geocoder"]["override_hits"] = gc.override_hits;
    counts["geocoder"]["service_calls"] = gc.service_calls;
    counts["geocoder"]["ambiguous"] = gc.ambiguous;
    counts["geocoder"]["failures"] = gc.failures;
    counts["diagnostics"] = diags.size();
    write_json_file(dir / "counts.json", counts);
    write_diagnostics_file(dir, diags);

    std::size_t cluster_events = 0;
    for (const QuoteCluster& c : clusters) cluster_events += c.offline_count();
    check_reconcile(events_resolved + events_unresolved == cluster_events,
                    "geocoded events vs cluster occurrences");
    check_reconcile(clusters_with_geo + clusters_excluded == clusters.size(),
                    "geo cluster partition");

    std::cout << "geo: " << clusters_with_geo << " clusters located, " << clusters_excluded
              << " excluded; " << gc.service_calls << " service calls (" << diags.size()
              << " diagnostics)\n";
    return diags.empty() ? kExitOk : kExitPartial;
}

int Pipeline::temporal() {
    write_config_copy(config_);
    const fs::path dir = temporal_dir(config_);
    fs::create_directories(dir);

    std::vector<QuoteCluster> clusters = load_clusters(match_dir(config_) / "clusters.jsonl",
                                                       "match");

    std::map<std::string, std::pair<double, std::string>> radius_by_cluster;
    {
        std::ifstream in = open_artifact(geo_dir(config_) / "gyration.jsonl", "geo");
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            json g = json::parse(line, nullptr, false);
            if (g.is_discarded()) {
                throw FatalError("corrupt artifact: " +
                                 (geo_dir(config_) / "gyration.jsonl").string());
            }
            radius_by_cluster[g["cluster_id"].get<std::string>()] = {
                g["radius"].get<double>(), g["units"].get<std::string>()};
        }
    }

    Diagnostics diags;

    std::vector<QuoteCluster> windowed = clusters;
    if (config_.window_start) {
        windowed = restrict_window(clusters, *config_.window_start, *config_.window_end);
        if (windowed.empty() && !clusters.empty()) {
            throw ConfigError("analysis window " + format_date(*config_.window_start) + ".." +
                              format_date(*config_.window_end) + " excludes all data");
        }
    }

    std::vector<CrossoverRecord> records;
    records.reserve(windowed.size());
    for (const QuoteCluster& c : windowed) records.push_back(lead_lag(c));
    CrossoverStats stats =
        crossover_stats(records, config_.window_start, config_.window_end);

    std::string crossover_body;
    for (const CrossoverRecord& r : records) {
        json o;
        o["cluster_id"] = r.cluster_id;
        if (r.first_offline) o["first_offline"] = format_date(*r.first_offline);
        if (r.first_online) o["first_online"] = format_date(*r.first_online);
        o["direction"] = std::string(direction_name(r.direction));
        if (r.gap_days) o["gap_days"] = *r.gap_days;
        crossover_body += o.dump();
        crossover_body += '\n';
    }
    write_text(dir / "crossover.jsonl", crossover_body);

    json stats_json;
    stats_json["n_both"] = stats.n_both;
    stats_json["n_online_first"] = stats.n_online_first;
    stats_json["n_offline_first"] = stats.n_offline_first;
    stats_json["n_same_day"] = stats.n_same_day;
    if (stats.pct_online_first) stats_json["pct_online_first"] = *stats.pct_online_first;
    if (stats.mean_gap_online_first) {
        stats_json["mean_gap_online_first"] = *stats.mean_gap_online_first;
        stats_json["sd_gap_online_first"] = *stats.sd_gap_online_first;
    }
    if (stats.mean_gap_offline_first) {
        stats_json["mean_gap_offline_first"] = *stats.mean_gap_offline_first;
        stats_json["sd_gap_offline_first"] = *stats.sd_gap_offline_first;
    }
    if (stats.window_start) {
        stats_json["window"]["start"] = format_date(*stats.window_start);
        stats_json["window"]["end"] = format_date(*stats.window_end);
    }
    write_json_file(dir / "crossover_stats.json", stats_json);

    // Fig. 4 analogue: per-day appearance counts in each medium.
    std::map<std::pair<Date, std::string>, std::size_t> daily;
    std::size_t windowed_offline = 0;
    std::size_t windowed_online = 0;
    for (const QuoteCluster& c : windowed) {
        for (const auto& occ : c.offline_occurrences) {
            ++daily[{occ.date, "offline"}];
            ++windowed_offline;
        }
        for (const auto& m : c.online_mentions) {
            ++daily[{m.date, "online"}];
            ++windowed_online;
        }
    }
    std::string fig4 = plot_header(config_, "fig4_daily_frequency") + "date,medium,count\n";
    std::size_t fig4_offline_sum = 0;
    std::size_t fig4_online_sum = 0;
    for (const auto& [key, count] : daily) {
        (key.second == "offline" ? fig4_offline_sum : fig4_online_sum) += count;
        fig4 += csv_join({format_date(key.first), key.second, std::to_string(count)});
        fig4 += '\n';
    }
    write_text(dir / "fig4_daily_frequency.csv", fig4);

    // Fig. 5 analogue: first appearance per cluster per medium; bubble
    // size is that cluster's in-window appearance count in the medium.
    std::string fig5 =
        plot_header(config_, "fig5_first_appearances") + "cluster_id,medium,first_date,count\n";
    for (const QuoteCluster& c : windowed) {
        if (!c.offline_occurrences.empty()) {
            Date first = c.offline_occurrences.front().date;
            for (const auto& occ : c.offline_occurrences) first = std::min(first, occ.date);
            fig5 += csv_join({c.cluster_id, "offline", format_date(first),
                              std::to_string(c.offline_count())});
            fig5 += '\n';
        }
        if (!c.online_mentions.empty()) {
            Date first = c.online_mentions.front().date;
            for (const auto& m : c.online_mentions) first = std::min(first, m.date);
            fig5 += csv_join({c.cluster_id, "online", format_date(first),
                              std::to_string(c.online_count())});
            fig5 += '\n';
        }
    }
    write_text(dir / "fig5_first_appearances.csv", fig5);

    // Fig. 3 analogue over the unwindowed corpus: spatial radius against
    // lifespan, for clusters that have both quantities.
    std::vector<const QuoteCluster*> eligible;
    std::vector<double> radii;
    std::vector<double> lifespans;
    std::string fig3_units;
    for (const QuoteCluster& c : clusters) {
        auto it = radius_by_cluster.find(c.cluster_id);
        if (it == radius_by_cluster.end() || c.offline_occurrences.empty()) continue;
        eligible.push_back(&c);
        radii.push_back(it->second.first);
        lifespans.push_back(static_cast<double>(lifespan(c)));
        fig3_units = it->second.second;
    }
    RegionClassification regions = classify_regions(
        radii, lifespans, config_.radius_quantile, config_.lifespan_quantile);
    if (regions.warning) {
        diags.push_back({"temporal", 0, *regions.warning});
    }
    std::string fig3 =
        plot_header(config_, "fig3_regions") + "cluster_id,radius,units,lifespan_days,region\n";
    for (std::size_t i = 0; i < eligible.size(); ++i) {
        fig3 += csv_join({eligible[i]->cluster_id, fmt_double(radii[i]), fig3_units,
                          std::to_string(static_cast<long long>(lifespans[i])),
                          std::string(region_name(regions.labels[i]))});
        fig3 += '\n';
    }
    write_text(dir / "fig3_regions.csv", fig3);

    json counts;
    counts["clusters_total"] = clusters.size();
    counts["clusters_in_window"] = windowed.size();
    counts["crossover"]["n_both"] = stats.n_both;
    counts["crossover"]["n_online_first"] = stats.n_online_first;
    counts["crossover"]["n_offline_first"] = stats.n_offline_first;
    counts["crossover"]["n_same_day"] = stats.n_same_day;
    counts["fig4"]["offline_total"] = fig4_offline_sum;
    counts["fig4"]["online_total"] = fig4_online_sum;
    counts["fig3"]["clusters"] = eligible.size();
    counts["region_thresholds"]["defined"] = regions.thresholds.defined;
    counts["region_thresholds"]["radius_quantile"] = regions.thresholds.radius_quantile;
    counts["region_thresholds"]["lifespan_quantile"] = regions.thresholds.lifespan_quantile;
    if (regions.thresholds.defined) {
        counts["region_thresholds"]["radius"] = regions.thresholds.radius;
        counts["region_thresholds"]["lifespan"] = regions.thresholds.lifespan;
    }
    counts["diagnostics"] = diags.size();
    write_json_file(dir / "counts.json", counts);
    write_diagnostics_file(dir, diags);

    check_reconcile(fig4_offline_sum == windowed_offline, "fig4 offline conservation");
    check_reconcile(fig4_online_sum == windowed_online, "fig4 online conservation");
    check_reconcile(records.size() == windowed.size(), "crossover record count");

    std::cout << "temporal: " << records.size() << " crossover records, " << stats.n_both
              << " clusters in both media (" << diags.size() << " diagnostics)\n";
    return diags.empty() ? kExitOk : kExitPartial;
}

int Pipeline::report() {
    write_config_copy(config_);
    const fs::path dir = report_dir(config_);
    fs::create_directories(dir);

    // Every upstream stage must have run.
    json corpus_counts = read_json_artifact(corpus_dir(config_) / "counts.json", "ingest");
    json match_counts = read_json_artifact(match_dir(config_) / "counts.json", "match");
    json geo_counts = read_json_artifact(geo_dir(config_) / "counts.json", "geo");
    json temporal_counts = read_json_artifact(temporal_dir(config_) / "counts.json", "temporal");
    json crossover_stats_json =
        read_json_artifact(temporal_dir(config_) / "crossover_stats.json", "temporal");
    json center_json = read_json_artifact(geo_dir(config_) / "center.json", "geo");
    std::vector<QuoteCluster> clusters = load_clusters(match_dir(config_) / "clusters.jsonl",
                                                       "match");

    Diagnostics diags;

    const std::size_t k = static_cast<std::size_t>(config_.top_k);
    auto take_top = [&](auto count_of) {
        std::vector<const QuoteCluster*> order;
        order.reserve(clusters.size());
        for (const QuoteCluster& c : clusters) order.push_back(&c);
        std::stable_sort(order.begin(), order.end(),
                         [&](const QuoteCluster* a, const QuoteCluster* b) {
                             const std::size_t ca = count_of(*a);
                             const std::size_t cb = count_of(*b);
                             if (ca != cb) return ca > cb;
                             return a->canonical < b->canonical;  // ties: canonical ascending
                         });
        if (order.size() > k) order.resize(k);
        return order;
    };
    auto offline_top = take_top([](const QuoteCluster& c) { return c.offline_count(); });
    auto online_top = take_top([](const QuoteCluster& c) { return c.online_count(); });

    auto top_csv = [&](const std::vector<const QuoteCluster*>& top, const std::string& schema) {
        std::string body = plot_header(config_, schema) +
                           "rank,cluster_id,canonical,offline_count,online_count\n";
        for (std::size_t i = 0; i < top.size(); ++i) {
            body += csv_join({std::to_string(i + 1), top[i]->cluster_id, top[i]->canonical,
                              std::to_string(top[i]->offline_count()),
                              std::to_string(top[i]->online_count())});
            body += '\n';
        }
        return body;
    };
    write_text(dir / "top_offline.csv", top_csv(offline_top, "top_offline"));
    write_text(dir / "top_online.csv", top_csv(online_top, "top_online"));

    std::set<std::string> offline_ids;
    std::set<std::string> online_ids;
    for (const auto* c : offline_top) offline_ids.insert(c->cluster_id);
    for (const auto* c : online_top) online_ids.insert(c->cluster_id);
    std::vector<std::string> intersection;
    std::set_intersection(offline_ids.begin(), offline_ids.end(), online_ids.begin(),
                          online_ids.end(), std::back_inserter(intersection));
    const std::size_t union_count =
        offline_ids.size() + online_ids.size() - intersection.size();

    json overlap;
    overlap["k"] = k;
    overlap["offline_top"] = json::array();
    for (const auto* c : offline_top) overlap["offline_top"].push_back(c->cluster_id);
    overlap["online_top"] = json::array();
    for (const auto* c : online_top) overlap["online_top"].push_back(c->cluster_id);
    overlap["intersection"] = intersection;
    overlap["intersection_count"] = intersection.size();
    overlap["union_count"] = union_count;
    if (union_count > 0) {
        overlap["jaccard"] =
            static_cast<double>(intersection.size()) / static_cast<double>(union_count);
    }
    write_json_file(dir / "overlap.json", overlap);

    check_reconcile(offline_top.size() <= k && online_top.size() <= k, "top-K size");
    check_reconcile(intersection.size() <= std::min(offline_ids.size(), online_ids.size()),
                    "top-K overlap");

    StopwordList stopwords = StopwordList::load(config_.stopwords_path);

    json effective;
    effective["window_start"] =
        config_.window_start ? json(format_date(*config_.window_start)) : json(nullptr);
    effective["window_end"] =
        config_.window_end ? json(format_date(*config_.window_end)) : json(nullptr);
    effective["gyration_mode"] = std::string(gyration_mode_name(config_.gyration_mode));
    effective["region_quantiles"]["radius"] = config_.radius_quantile;
    effective["region_quantiles"]["lifespan"] = config_.lifespan_quantile;
    effective["top_k"] = config_.top_k;
    effective["seed"] = config_.seed;

    // Human-readable summary with the headline numbers.
    std::ostringstream text;
    text << "quotecross run summary\n";
    text << "======================\n\n";
    text << "corpus\n";
    text << "  offline events loaded:   " << corpus_counts["offline"]["loaded"] << " (of "
         << corpus_counts["offline"]["rows"] << " rows, "
         << corpus_counts["offline"]["skipped"] << " skipped)\n";
    text << "  online posts loaded:     " << corpus_counts["online"]["loaded"] << " (of "
         << corpus_counts["online"]["rows"] << " rows, " << corpus_counts["online"]["skipped"]
         << " skipped)\n";
    text << "  online posts after dedup: " << corpus_counts["online"]["after_dedup"] << "\n\n";
    text << "matching\n";
    text << "  offline quote clusters:  " << match_counts["offline_clusters"]["initial"]
         << " (" << match_counts["offline_clusters"]["kept"] << " kept after merges/annotation)\n";
    if (match_counts["annotation"].contains("ratio")) {
        text << "  annotation ratio:        " << match_counts["annotation"]["ratio"]
             << " marked authentic\n";
    }
    text << "  online clusters:         " << match_counts["online_clusters"]["count"] << "\n";
    text << "  mentioned posts:         " << match_counts["mentions"]["total_posts"]
         << " (exact " << match_counts["mentions"]["exact_posts"] << ", loose-only "
         << match_counts["mentions"]["loose_only_posts"] << ")\n";
    text << "  mention pairs:           " << match_counts["mentions"]["mention_pairs"] << "\n\n";
    text << "geospatial\n";
    text << "  clusters with geometry:  " << geo_counts["clusters"]["with_geo"] << " ("
         << geo_counts["clusters"]["excluded"] << " excluded)\n";
    text << "  events resolved:         " << geo_counts["events"]["resolved"] << " of "
         << geo_counts["events"]["total"] << "\n";
    if (!center_json["center"].is_null()) {
        text << "  propaganda center:       (" << center_json["center"]["lat"] << ", "
             << center_json["center"]["lon"] << ")\n";
        if (center_json.contains("reference_comparison")) {
            text << "  vs reference:            "
                 << center_json["reference_comparison"]["quadrant"].get<std::string>()
                 << " (dlat " << center_json["reference_comparison"]["dlat"] << ", dlon "
                 << center_json["reference_comparison"]["dlon"] << ")\n";
        }
    }
    text << "\ntemporal\n";
    text << "  clusters in window:      " << temporal_counts["clusters_in_window"] << " of "
         << temporal_counts["clusters_total"] << "\n";
    text << "  present in both media:   " << crossover_stats_json["n_both"] << "\n";
    if (crossover_stats_json.contains("pct_online_first")) {
        text << "  online-first share:      " << crossover_stats_json["pct_online_first"]
             << " (" << crossover_stats_json["n_online_first"] << " online-first vs "
             << crossover_stats_json["n_offline_first"] << " offline-first, "
             << crossover_stats_json["n_same_day"] << " same-day)\n";
    }
    if (crossover_stats_json.contains("mean_gap_online_first")) {
        text << "  online-first gap:        mean " << crossover_stats_json["mean_gap_online_first"]
             << " days, sd " << crossover_stats_json["sd_gap_online_first"] << "\n";
    }
    if (crossover_stats_json.contains("mean_gap_offline_first")) {
        text << "  offline-first gap:       mean "
             << crossover_stats_json["mean_gap_offline_first"] << " days, sd "
             << crossover_stats_json["sd_gap_offline_first"] << "\n";
    }
    text << "\nreport\n";
    text << "  top-" << k << " overlap:           " << intersection.size()
         << " clusters in both top lists\n";
    text << "\nversions\n";
    text << "  stopwords:               " << stopwords.version << "\n";
    text << "  unicode data:            " << uni::unicode_data_version() << "\n";
    text << "\nconfig\n";
    text << "  digest:                  sha256:" << config_.config_digest << "\n";
    text << "  effective settings:      " << effective.dump() << "\n";
    text << "  verbatim copy:           config.json (in this output directory)\n";
    write_text(dir / "summary.txt", text.str());

    // Machine-readable run report with a digest manifest over every other
    // artifact in the output directory.
    json report;
    report["config"]["digest"] = config_.config_digest;
    report["config"]["effective"] = effective;
    report["counts"]["corpus"] = corpus_counts;
    report["counts"]["match"] = match_counts;
    report["counts"]["geo"] = geo_counts;
    report["counts"]["temporal"] = temporal_counts;
    report["stats"]["crossover"] = crossover_stats_json;
    report["stats"]["center"] = center_json;
    report["top"]["overlap"] = overlap;
    report["versions"]["stopwords"] = stopwords.version;
    report["versions"]["unicode_data"] = std::string(uni::unicode_data_version());

    // The diagnostics file must exist before the manifest is computed so
    // its digest is covered too.
    write_diagnostics_file(dir, diags);

    std::map<std::string, std::string> digests;
    for (auto it = fs::recursive_directory_iterator(config_.out_dir);
         it != fs::recursive_directory_iterator(); ++it) {
        if (!it->is_regular_file()) continue;
        const std::string rel = fs::relative(it->path(), config_.out_dir).generic_string();
        if (rel == "report/run_report.json") continue;  // cannot include its own digest
        digests[rel] = sha256_file_hex(it->path());
    }
    json manifest = json::object();
    for (const auto& [rel, digest] : digests) manifest[rel] = digest;
    report["artifacts"] = manifest;
    write_json_file(dir / "run_report.json", report);

    std::cout << "report: summary and run report written to " << dir.string() << " ("
              << diags.size() << " diagnostics)\n";
    return diags.empty() ? kExitOk : kExitPartial;
}

int Pipeline::run_all(GeocoderClient* client) {
    int worst = kExitOk;
    worst = std::max(worst, ingest());
    worst = std::max(worst, match());
    worst = std::max(worst, geo(client));
    worst = std::max(worst, temporal());
    worst = std::max(worst, report());
    return worst;
}

}  // namespace quotecross
