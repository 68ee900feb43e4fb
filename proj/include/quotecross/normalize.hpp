#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace quotecross {

// Stopword list pinned as a data file; the version label travels into
// every report so runs stay comparable.
struct StopwordList {
    std::unordered_set<std::string> words;
    std::string version;

    // File format: a "# stopwords-version: <label>" header line, then one
    // token per line (UTF-8, '#' lines and blanks ignored). Throws
    // FatalError on unreadable files or a missing header.
    static StopwordList load(const std::filesystem::path& path);

    bool contains(std::string_view token) const {
        return words.find(std::string(token)) != words.end();
    }
};

// Two-tier normal form of a quote or post body.
//
// exact_tokens: case-folded tokens, punctuation runs kept as tokens.
// loose_tokens: exact_tokens minus punctuation tokens and stopwords.
// Keys are the token sequences joined by single spaces; tokens never
// contain spaces, so the joined form is unambiguous.
struct NormalForm {
    std::vector<std::string> exact_tokens;
    std::vector<std::string> loose_tokens;
    std::string exact_key;
    std::string loose_key;

    // True when every token was punctuation or a stopword; such texts
    // cannot participate in matching.
    bool unmatchable() const { return loose_key.empty(); }
};

class Normalizer {
  public:
    explicit Normalizer(StopwordList stopwords) : stopwords_(std::move(stopwords)) {}

    // Deterministic: splits on Unicode whitespace, emits each maximal run
    // of punctuation as its own token, case-folds, then derives the loose
    // tier by dropping punctuation tokens and stopwords.
    NormalForm normalize(std::string_view text) const;

    const StopwordList& stopwords() const { return stopwords_; }

  private:
    StopwordList stopwords_;
};

std::string join_tokens(const std::vector<std::string>& tokens);

}  // namespace quotecross
