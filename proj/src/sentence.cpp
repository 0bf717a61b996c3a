#include "nerforge/sentence.hpp"

#include <cctype>
#include <unordered_set>

#include "nerforge/text_util.hpp"

namespace nerforge {

namespace {

// Short abbreviation stop-list; the word before a '.' is looked up here
// case-insensitively (without the dot).
const std::unordered_set<std::string>& abbreviations() {
    static const std::unordered_set<std::string> kSet = {
        "dr",  "mr",   "mrs", "ms",  "prof", "sr",  "jr",   "st",  "vs",
        "etc", "ie",   "eg",  "cf",  "ca",   "no",  "inc",  "ltd", "co",
        "fig", "vol",  "pp",  "p",   "ed",   "eds", "al",   "op",  "cit",
        "approx", "dept", "est", "gen", "gov", "rev", "sgt", "capt"};
    return kSet;
}

bool is_closing_mark(char c) {
    return c == '"' || c == '\'' || c == ')' || c == ']';
}

// Word immediately before position `i` (exclusive), letters only.
std::string_view word_before(std::string_view text, size_t i) {
    size_t end = i;
    size_t start = end;
    while (start > 0) {
        const auto c = static_cast<unsigned char>(text[start - 1]);
        if (std::isalpha(c) || c >= 0x80) {
            --start;
        } else {
            break;
        }
    }
    return text.substr(start, end - start);
}

bool is_abbreviation(std::string_view word) {
    if (word.empty() || word.size() > 8) return false;
    std::string lower;
    lower.reserve(word.size());
    for (const char c : word) {
        lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return abbreviations().count(lower) > 0;
}

bool uppercase_or_digit_start(std::string_view rest) {
    size_t i = 0;
    while (i < rest.size()) {
        const char32_t cp = utf8_next(rest, i);
        if (is_space(cp)) continue;
        if (cp == '"' || cp == '\'' || cp == '(' || cp == 0xAB || cp == 0x201C || cp == 0x2018) {
            continue;  // opening quote/bracket, look at what follows
        }
        return is_ascii_digit(cp) || (to_lower(cp) != cp);
    }
    return false;
}

}  // namespace

std::vector<TextRange> split_sentence_ranges(std::string_view text) {
    std::vector<TextRange> ranges;
    size_t start = 0;

    auto emit = [&](size_t end) {
        size_t b = start;
        size_t e = end;
        while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
        if (b < e) ranges.push_back({b, e});
        start = end;
    };

    for (size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '\n') {
            emit(i + 1);
            continue;
        }
        if (c != '.' && c != '!' && c != '?') continue;

        if (c == '.') {
            // "3.14" / "1.000" style decimals and digit groupings.
            const bool digit_before = i > 0 && std::isdigit(static_cast<unsigned char>(text[i - 1]));
            const bool digit_after =
                i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1]));
            if (digit_before && digit_after) continue;
            if (is_abbreviation(word_before(text, i))) continue;
        }

        // Absorb run of terminal marks plus closing quotes/brackets.
        size_t end = i + 1;
        while (end < text.size() &&
               (text[end] == '.' || text[end] == '!' || text[end] == '?')) {
            ++end;
        }
        while (end < text.size() && is_closing_mark(text[end])) ++end;

        // "e.g.next" style run-ons: a '.' must be followed by whitespace
        // (after closing marks) or end of text to close a sentence.
        if (c == '.' && end < text.size() &&
            !std::isspace(static_cast<unsigned char>(text[end]))) {
            continue;
        }

        if (end >= text.size() || uppercase_or_digit_start(text.substr(end))) {
            emit(end);
            i = end - 1;
        }
    }
    emit(text.size());
    return ranges;
}

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    for (const TextRange& r : split_sentence_ranges(text)) {
        out.emplace_back(text.substr(r.begin, r.end - r.begin));
    }
    return out;
}

std::vector<TokenSpan> tokenize_with_offsets(std::string_view sentence) {
    std::vector<TokenSpan> tokens;

    size_t i = 0;
    while (i < sentence.size()) {
        // Skip whitespace.
        size_t ws = i;
        const char32_t cp = utf8_next(sentence, ws);
        if (is_space(cp)) {
            i = ws;
            continue;
        }

        // Chunk: run of non-space code points, with per-code-point offsets.
        std::vector<size_t> cps;  // code point start offsets, plus end sentinel
        while (i < sentence.size()) {
            size_t next = i;
            const char32_t c = utf8_next(sentence, next);
            if (is_space(c)) break;
            cps.push_back(i);
            i = next;
        }
        cps.push_back(i);
        const size_t n = cps.size() - 1;

        auto cp_at = [&](size_t k) {
            size_t pos = cps[k];
            return utf8_next(sentence, pos);
        };

        // Peel punctuation off both edges, one code point per token.
        size_t lo = 0;
        size_t hi = n;
        while (lo < hi && is_edge_punct(cp_at(lo))) ++lo;
        while (hi > lo && is_edge_punct(cp_at(hi - 1))) --hi;

        for (size_t k = 0; k < lo; ++k) {
            tokens.push_back({std::string(sentence.substr(cps[k], cps[k + 1] - cps[k])),
                              cps[k], cps[k + 1]});
        }
        if (lo < hi) {
            tokens.push_back({std::string(sentence.substr(cps[lo], cps[hi] - cps[lo])),
                              cps[lo], cps[hi]});
        }
        for (size_t k = hi; k < n; ++k) {
            tokens.push_back({std::string(sentence.substr(cps[k], cps[k + 1] - cps[k])),
                              cps[k], cps[k + 1]});
        }
    }
    return tokens;
}

std::vector<std::string> tokenize(std::string_view sentence) {
    std::vector<std::string> out;
    for (const TokenSpan& t : tokenize_with_offsets(sentence)) out.push_back(t.surface);
    return out;
}

}  // namespace nerforge
