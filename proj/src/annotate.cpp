#include "nerforge/annotate.hpp"

#include <algorithm>
#include <stdexcept>

namespace nerforge {

TaggedSentence project_spans(const std::vector<TokenSpan>& tokens,
                             const std::vector<TaggedSpan>& spans) {
    TaggedSentence out;
    out.tokens.reserve(tokens.size());
    for (const TokenSpan& tok : tokens) {
        out.tokens.push_back({tok.surface, "O"});
    }

    size_t sentence_end = 0;
    for (const TokenSpan& tok : tokens) sentence_end = std::max(sentence_end, tok.end);

    for (const TaggedSpan& span : spans) {
        if (span.start >= span.end || span.end > sentence_end) {
            throw std::logic_error("link span outside sentence bounds");
        }
        bool first = true;
        for (size_t i = 0; i < tokens.size(); ++i) {
            const TokenSpan& tok = tokens[i];
            if (tok.begin < span.end && span.start < tok.end) {
                // A token straddling two adjacent spans stays with the first
                // claimant; partial overlap extends to the whole token.
                if (out.tokens[i].label != "O") continue;
                out.tokens[i].label = (first ? "B-" : "I-") + span.tag;
                first = false;
            }
        }
    }
    return out;
}

std::vector<TaggedSentence> filter_sentences(const std::vector<TaggedSentence>& sentences) {
    std::vector<TaggedSentence> kept;
    for (const TaggedSentence& sentence : sentences) {
        const bool has_entity =
            std::any_of(sentence.tokens.begin(), sentence.tokens.end(),
                        [](const Token& t) { return is_begin(t.label); });
        if (has_entity) kept.push_back(sentence);
    }
    return kept;
}

std::vector<TaggedSentence> annotate_document(const LinkedDocument& doc,
                                              const EntityTagMap& tags,
                                              AnnotateReport* report) {
    AnnotateReport local;
    AnnotateReport& rep = report ? *report : local;

    const std::vector<TextRange> ranges = split_sentence_ranges(doc.text);
    std::vector<TaggedSentence> result;
    result.reserve(ranges.size());

    size_t link_idx = 0;
    for (const TextRange& range : ranges) {
        // Spans starting before this sentence were handled (or clipped) by an
        // earlier one; links are sorted by start offset.
        while (link_idx < doc.links.size() && doc.links[link_idx].start < range.begin) {
            ++link_idx;
        }
        std::vector<TaggedSpan> spans;
        for (size_t i = link_idx; i < doc.links.size() && doc.links[i].start < range.end; ++i) {
            const LinkSpan& link = doc.links[i];
            const auto it = tags.find(link.target);
            if (it == tags.end()) {
                ++rep.untagged_spans;
                continue;
            }
            size_t end = link.end;
            if (end > range.end) {
                end = range.end;  // splitter artifact: clip to this sentence
                ++rep.clipped_spans;
            }
            if (link.start >= end) continue;
            spans.push_back({link.start - range.begin, end - range.begin, it->second});
        }

        const std::string_view sentence =
            std::string_view(doc.text).substr(range.begin, range.end - range.begin);
        const std::vector<TokenSpan> tokens = tokenize_with_offsets(sentence);
        if (tokens.empty()) continue;
        result.push_back(project_spans(tokens, spans));
    }
    return filter_sentences(result);
}

}  // namespace nerforge
