#include "quotecross/unicode.hpp"

#include <algorithm>
#include <iterator>

namespace quotecross::uni {

namespace {

struct CodepointRange {
    uint32_t lo;
    uint32_t hi;
};

struct FoldPair {
    uint32_t from;
    uint32_t to;
};

#include "unicode_tables.inc"

bool in_ranges(const CodepointRange* first, const CodepointRange* last, char32_t cp) {
    auto it = std::upper_bound(first, last, static_cast<uint32_t>(cp),
                               [](uint32_t v, const CodepointRange& r) { return v < r.lo; });
    return it != first && static_cast<uint32_t>(cp) <= std::prev(it)->hi;
}

}  // namespace

const char* unicode_data_version() { return kUnicodeDataVersion; }

char32_t decode_utf8(std::string_view s, std::size_t& i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }

    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return kReplacement;
    }

    if (i + len > s.size()) {
        ++i;
        return kReplacement;
    }
    for (int k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) {
            ++i;
            return kReplacement;
        }
        cp = (cp << 6) | (b & 0x3F);
    }

    // Reject overlong encodings, surrogates and out-of-range values.
    static constexpr char32_t kMinForLen[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMinForLen[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        ++i;
        return kReplacement;
    }
    i += len;
    return cp;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_space(char32_t cp) {
    return in_ranges(std::begin(kSpaceRanges), std::end(kSpaceRanges), cp);
}

bool is_word(char32_t cp) {
    if (cp < 0x80) {  // ASCII fast path
        return (cp >= '0' && cp <= '9') || (cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z');
    }
    return in_ranges(std::begin(kWordRanges), std::end(kWordRanges), cp);
}

char32_t fold(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
    }
    auto it = std::lower_bound(std::begin(kFoldPairs), std::end(kFoldPairs),
                               static_cast<uint32_t>(cp),
                               [](const FoldPair& p, uint32_t v) { return p.from < v; });
    if (it != std::end(kFoldPairs) && it->from == static_cast<uint32_t>(cp)) {
        return it->to;
    }
    return cp;
}

std::string fold_utf8(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        append_utf8(out, fold(decode_utf8(s, i)));
    }
    return out;
}

}  // namespace quotecross::uni
