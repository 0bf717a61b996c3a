// Projects entity link spans onto tokenized sentences as IOB2 labels and
// keeps only sentences carrying at least one entity.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nerforge/article.hpp"
#include "nerforge/corpus.hpp"
#include "nerforge/mapping.hpp"
#include "nerforge/sentence.hpp"

namespace nerforge {

// A span with its resolved tag, in sentence-local character coordinates.
struct TaggedSpan {
    size_t start = 0;
    size_t end = 0;
    std::string tag;  // rendered UNER tag
};

// First token intersecting a span gets B-, later ones I-; partial overlap
// extends to the whole token. Spans must be non-overlapping and within the
// sentence (violations are internal defects and throw std::logic_error).
TaggedSentence project_spans(const std::vector<TokenSpan>& tokens,
                             const std::vector<TaggedSpan>& spans);

std::vector<TaggedSentence> filter_sentences(const std::vector<TaggedSentence>& sentences);

struct AnnotateReport {
    uint64_t clipped_spans = 0;    // link spans crossing a sentence boundary
    uint64_t untagged_spans = 0;   // spans whose entity has no UNER tag
};

// Rendered tag per entity title; titles without a tag are simply absent.
using EntityTagMap = std::map<std::string, std::string>;

// Full per-document pass: sentence split, tokenize, project, filter.
std::vector<TaggedSentence> annotate_document(const LinkedDocument& doc,
                                              const EntityTagMap& tags,
                                              AnnotateReport* report = nullptr);

}  // namespace nerforge
