// Wikitext markup stripping with hyperlink preservation.
//
// Stripping rules (documented contract, see README):
//   - [[Target]] renders "Target"; [[Target|shown]] renders "shown"; the
//     rendered anchor is recorded as a LinkSpan with the normalized target.
//   - Namespace-prefixed targets (File:, Category:, wikt:, xx: interwiki, ...)
//     are dropped entirely, never emitted as entities.
//   - Templates {{...}} (balanced-brace scan, nesting cap 16), tables {|...|},
//     HTML comments, <ref> elements and similar non-prose elements are
//     removed; other HTML-ish tags are stripped keeping their content.
//   - Heading markup is removed, heading text kept on its own line; list
//     markers and bold/italic quotes are removed; HTML entities decoded.
//   - Unbalanced constructs recover best-effort (content kept, marker
//     dropped) and are counted in StripReport.
#pragma once

#include <set>
#include <string>
#include <string_view>

#include "nerforge/article.hpp"

namespace nerforge {

struct StripReport {
    uint64_t unbalanced = 0;        // stray/unmatched markup tokens
    uint64_t namespace_links = 0;   // dropped File:/Category:/interwiki links

    StripReport& operator+=(const StripReport& o) {
        unbalanced += o.unbalanced;
        namespace_links += o.namespace_links;
        return *this;
    }
};

// Canonical MediaWiki title form: fragment stripped, percent-decoded,
// whitespace/underscore runs collapsed to single underscores, first code
// point uppercased.
std::string normalize_title(std::string_view raw);

bool is_redirect_wikitext(std::string_view wikitext);

// Pure per-article markup stripping; safe to call concurrently.
// `extra_namespaces` adds the dump's declared localized namespace names
// (lowercased, from DumpReader::declared_namespaces) to the built-in
// English/interwiki prefix detection.
LinkedDocument strip_and_link(const RawArticle& article, StripReport* report = nullptr,
                              const std::set<std::string>* extra_namespaces = nullptr);

}  // namespace nerforge
