#include "nerforge/article.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "nerforge/text_util.hpp"

namespace nerforge {

using nlohmann::json;

namespace {

// Sorted byte offsets of every code point boundary, plus the end sentinel.
std::vector<size_t> codepoint_boundaries(const std::string& text) {
    std::vector<size_t> bounds;
    bounds.reserve(text.size() + 1);
    for (size_t i = 0; i < text.size();) {
        bounds.push_back(i);
        utf8_next(text, i);
    }
    bounds.push_back(text.size());
    return bounds;
}

}  // namespace

std::vector<LinkSpan> spans_to_codepoint_offsets(const std::string& text,
                                                 const std::vector<LinkSpan>& links) {
    const std::vector<size_t> bounds = codepoint_boundaries(text);
    auto to_cp = [&](size_t byte_offset) {
        const auto it = std::lower_bound(bounds.begin(), bounds.end(), byte_offset);
        return static_cast<size_t>(it - bounds.begin());
    };
    std::vector<LinkSpan> out = links;
    for (LinkSpan& span : out) {
        span.start = to_cp(span.start);
        span.end = to_cp(span.end);
    }
    return out;
}

std::vector<LinkSpan> spans_to_byte_offsets(const std::string& text,
                                            const std::vector<LinkSpan>& links) {
    const std::vector<size_t> bounds = codepoint_boundaries(text);
    std::vector<LinkSpan> out = links;
    for (LinkSpan& span : out) {
        span.start = bounds.at(std::min(span.start, bounds.size() - 1));
        span.end = bounds.at(std::min(span.end, bounds.size() - 1));
    }
    return out;
}

std::string document_to_jsonl(const LinkedDocument& doc) {
    json links = json::array();
    for (const LinkSpan& span : spans_to_codepoint_offsets(doc.text, doc.links)) {
        links.push_back({{"start", span.start},
                         {"end", span.end},
                         {"target", span.target},
                         {"anchor", span.anchor}});
    }
    const json j = {{"page_id", doc.page_id},
                    {"title", doc.title},
                    {"text", doc.text},
                    {"links", links}};
    // Invalid UTF-8 from a corrupt dump degrades to U+FFFD instead of
    // aborting the stage; spans stay aligned (one code point either way).
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

LinkedDocument document_from_jsonl(const std::string& line) {
    const json j = json::parse(line);
    LinkedDocument doc;
    doc.page_id = j.at("page_id").get<uint64_t>();
    doc.title = j.at("title").get<std::string>();
    doc.text = j.at("text").get<std::string>();
    for (const json& l : j.at("links")) {
        LinkSpan span;
        span.start = l.at("start").get<size_t>();
        span.end = l.at("end").get<size_t>();
        span.target = l.at("target").get<std::string>();
        span.anchor = l.at("anchor").get<std::string>();
        doc.links.push_back(std::move(span));
    }
    doc.links = spans_to_byte_offsets(doc.text, doc.links);
    return doc;
}

std::vector<std::string> collect_entities(const std::vector<LinkedDocument>& docs) {
    std::set<std::string> unique;
    for (const LinkedDocument& doc : docs) {
        for (const LinkSpan& span : doc.links) {
            unique.insert(span.target);
        }
    }
    return {unique.begin(), unique.end()};
}

}  // namespace nerforge
