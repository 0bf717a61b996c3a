// Core document types: raw dump articles and markup-stripped documents with
// hyperlink spans, plus the JSON-lines stage boundary format.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nerforge {

struct RawArticle {
    uint64_t page_id = 0;
    std::string title;
    std::string wikitext;
    std::string language;  // ISO 639-1
    bool is_redirect = false;
};

// [start, end) character offsets into LinkedDocument::text. `anchor` is the
// visible surface form and always equals text.substr(start, end - start);
// `target` is the normalized entity title.
struct LinkSpan {
    size_t start = 0;
    size_t end = 0;
    std::string target;
    std::string anchor;

    bool operator==(const LinkSpan&) const = default;
};

struct LinkedDocument {
    uint64_t page_id = 0;
    std::string title;
    std::string text;
    std::vector<LinkSpan> links;  // non-overlapping, sorted by start

    bool operator==(const LinkedDocument&) const = default;
};

// One document per line, fields page_id/title/text/links[]. In-memory span
// offsets index UTF-8 bytes; the serialized form uses character (code point)
// offsets so any consumer slicing text[start:end] gets the anchor.
std::string document_to_jsonl(const LinkedDocument& doc);
LinkedDocument document_from_jsonl(const std::string& line);

// Byte offsets -> code point offsets for every span (and the reverse).
std::vector<LinkSpan> spans_to_codepoint_offsets(const std::string& text,
                                                 const std::vector<LinkSpan>& links);
std::vector<LinkSpan> spans_to_byte_offsets(const std::string& text,
                                            const std::vector<LinkSpan>& links);

// Unique normalized link targets over a document stream, sorted by code
// point (byte) order.
std::vector<std::string> collect_entities(const std::vector<LinkedDocument>& docs);

}  // namespace nerforge
