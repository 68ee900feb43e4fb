#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace quotecross::uni {

// Replacement character emitted for malformed UTF-8 sequences.
inline constexpr char32_t kReplacement = 0xFFFD;

// Version of the Unicode data the embedded tables were generated from.
const char* unicode_data_version();

// Decodes the code point starting at s[i] and advances i past it.
// Malformed sequences consume one byte and decode to kReplacement.
char32_t decode_utf8(std::string_view s, std::size_t& i);

void append_utf8(std::string& out, char32_t cp);

// White_Space property.
bool is_space(char32_t cp);

// Letters, numbers and combining marks; everything else that is not
// whitespace is treated as punctuation by the tokenizer.
bool is_word(char32_t cp);

// One-to-one case folding; code points without a single-code-point
// mapping are returned unchanged.
char32_t fold(char32_t cp);

// Folds every code point of a UTF-8 string.
std::string fold_utf8(std::string_view s);

}  // namespace quotecross::uni
