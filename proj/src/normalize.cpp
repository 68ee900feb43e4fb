#include "quotecross/normalize.hpp"

#include <fstream>

#include "quotecross/errors.hpp"
#include "quotecross/unicode.hpp"

namespace quotecross {

namespace {

constexpr std::string_view kVersionHeader = "# stopwords-version:";

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

}  // namespace

StopwordList StopwordList::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw FatalError("cannot open stopword file: " + path.string());
    }
    StopwordList list;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (first) {
            first = false;
            if (!t.starts_with(kVersionHeader)) {
                throw FatalError("stopword file missing '# stopwords-version:' header: " +
                                 path.string());
            }
            list.version = trim(t.substr(kVersionHeader.size()));
            if (list.version.empty()) {
                throw FatalError("stopword file has empty version label: " + path.string());
            }
            continue;
        }
        if (t.empty() || t[0] == '#') continue;
        list.words.insert(uni::fold_utf8(t));
    }
    if (first) {
        throw FatalError("stopword file is empty: " + path.string());
    }
    return list;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

NormalForm Normalizer::normalize(std::string_view text) const {
    NormalForm form;
    std::string token;
    bool token_is_word = false;
    bool in_token = false;

    auto flush = [&]() {
        if (!in_token) return;
        form.exact_tokens.push_back(token);
        if (token_is_word && !stopwords_.contains(token)) {
            form.loose_tokens.push_back(token);
        }
        token.clear();
        in_token = false;
    };

    std::size_t i = 0;
    while (i < text.size()) {
        const char32_t cp = uni::decode_utf8(text, i);
        if (uni::is_space(cp)) {
            flush();
            continue;
        }
        const bool word = uni::is_word(cp);
        if (in_token && word != token_is_word) flush();
        if (!in_token) {
            in_token = true;
            token_is_word = word;
        }
        uni::append_utf8(token, uni::fold(cp));
    }
    flush();

    form.exact_key = join_tokens(form.exact_tokens);
    form.loose_key = join_tokens(form.loose_tokens);
    return form;
}

}  // namespace quotecross
