// Sentence splitting and punctuation-isolating tokenization.
//
// Splitting: boundaries only at '.', '!', '?' or newline. A terminal mark
// ends a sentence when followed by whitespace and an upquote/uppercase/digit
// start, unless the preceding word is a known abbreviation, a single
// initial, or the mark sits between digits.
//
// Tokenization: whitespace-delimited chunks with leading/trailing
// punctuation peeled off as separate tokens; word-internal hyphens,
// apostrophes and other marks are preserved.
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nerforge {

struct TextRange {
    size_t begin = 0;
    size_t end = 0;  // exclusive

    bool operator==(const TextRange&) const = default;
};

// Trimmed, non-empty sentence ranges into `text`.
std::vector<TextRange> split_sentence_ranges(std::string_view text);

std::vector<std::string> split_sentences(std::string_view text);

struct TokenSpan {
    std::string surface;
    size_t begin = 0;  // offsets into the sentence
    size_t end = 0;

    bool operator==(const TokenSpan&) const = default;
};

std::vector<TokenSpan> tokenize_with_offsets(std::string_view sentence);

std::vector<std::string> tokenize(std::string_view sentence);

}  // namespace nerforge
