// Small UTF-8 and string helpers shared across the pipeline.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nerforge {

// Decodes the code point starting at byte offset `i` and advances `i` past it.
// Malformed sequences decode as the single byte value (latin-1 fallback) so
// the scan always makes progress.
char32_t utf8_next(std::string_view s, size_t& i);

// Appends `cp` to `out` as UTF-8.
void utf8_append(std::string& out, char32_t cp);

// Number of code points in `s`.
size_t utf8_length(std::string_view s);

// Uppercase mapping for the first code point only. Covers ASCII, Latin-1
// supplement and Latin Extended-A (enough for the European language
// editions this targets); anything else passes through unchanged.
char32_t to_upper(char32_t cp);
char32_t to_lower(char32_t cp);
bool is_lower_letter(char32_t cp);

bool is_ascii_digit(char32_t cp);
bool is_space(char32_t cp);

// Punctuation that the tokenizer peels off token edges: ASCII punctuation
// plus common typographic marks (dashes, curly quotes, ellipsis, guillemets).
bool is_edge_punct(char32_t cp);

// Replaces %XX escapes; invalid escapes are kept literally.
std::string percent_decode(std::string_view s);

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

bool starts_with(std::string_view s, std::string_view prefix);

// Case-insensitive ASCII comparison (used for namespace prefixes).
bool iequals_ascii(std::string_view a, std::string_view b);

// Lowercases every code point the case tables cover (ASCII + Latin-1 +
// Latin Extended-A); everything else passes through.
std::string utf8_to_lower(std::string_view s);

}  // namespace nerforge
