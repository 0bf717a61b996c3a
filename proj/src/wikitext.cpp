#include "nerforge/wikitext.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

#include "nerforge/text_util.hpp"

namespace nerforge {

namespace {

constexpr int kTemplateNestingCap = 16;

// Elements whose entire content is non-prose and gets dropped.
const std::unordered_set<std::string>& drop_whole_elements() {
    static const std::unordered_set<std::string> kSet = {
        "ref",    "references", "math",  "gallery",  "timeline",        "source",
        "score",  "imagemap",   "hiero", "chem",     "syntaxhighlight", "mapframe",
        "graph",  "templatedata"};
    return kSet;
}

// Namespace prefixes whose links are dropped (MediaWiki standard set plus
// common interwiki shortcuts). Two/three-letter lowercase prefixes are
// additionally treated as language interwikis.
const std::unordered_set<std::string>& namespace_prefixes() {
    static const std::unordered_set<std::string> kSet = {
        "file",      "image",     "media",      "category",    "template",
        "wikipedia", "help",      "portal",     "special",     "talk",
        "user",      "draft",     "module",     "mediawiki",   "book",
        "timedtext", "gadget",    "wp",         "wikt",        "wiktionary",
        "wikisource","wikibooks", "wikiquote",  "wikinews",    "wikiversity",
        "wikivoyage","wikispecies","wikidata",  "commons",     "meta",
        "incubator", "phabricator","mw",        "doi",         "arxiv",
        "user talk", "file talk", "talk",       "category talk",
        "template talk", "wikipedia talk", "help talk", "portal talk"};
    return kSet;
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_namespace_prefix(std::string_view prefix, const std::set<std::string>* extra) {
    const std::string p = utf8_to_lower(trim(prefix));
    if (p.empty()) return false;
    if (namespace_prefixes().count(p)) return true;
    if (extra && extra->count(p)) return true;
    // Language interwikis: xx, xxx, or dash-extended codes like zh-min-nan.
    size_t letters = 0;
    bool plain = true;
    for (char c : p) {
        if (c >= 'a' && c <= 'z') {
            ++letters;
        } else if (c == '-') {
            plain = false;
        } else {
            return false;
        }
    }
    if (plain) return p.size() >= 2 && p.size() <= 3;
    const size_t dash = p.find('-');
    return dash >= 2 && dash <= 3 && p.size() <= 16 && letters >= 3;
}

// --- HTML entity decoding -------------------------------------------------

const std::unordered_map<std::string, std::string>& entity_table() {
    static const std::unordered_map<std::string, std::string> kTable = {
        {"amp", "&"},      {"lt", "<"},       {"gt", ">"},      {"quot", "\""},
        {"apos", "'"},     {"nbsp", " "},     {"thinsp", " "},  {"ensp", " "},
        {"emsp", " "},     {"ndash", "–"}, {"mdash", "—"},
        {"hellip", "…"}, {"middot", "·"}, {"times", "×"},
        {"minus", "−"},  {"deg", "°"},    {"laquo", "«"},
        {"raquo", "»"},  {"prime", "′"},  {"shy", ""},
        {"zwnj", ""},         {"zwj", ""},          {"lsquo", "‘"},
        {"rsquo", "’"},  {"ldquo", "“"},  {"rdquo", "”"}};
    return kTable;
}

// Decodes the entity starting at s[i] ('&'). On success writes the
// replacement and returns the position just past ';', otherwise npos.
size_t decode_entity(std::string_view s, size_t i, std::string& out) {
    const size_t semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) return std::string_view::npos;
    const std::string_view body = s.substr(i + 1, semi - i - 1);
    if (body.empty()) return std::string_view::npos;
    if (body[0] == '#') {
        char32_t cp = 0;
        bool ok = false;
        if (body.size() > 2 && (body[1] == 'x' || body[1] == 'X')) {
            for (size_t k = 2; k < body.size(); ++k) {
                const char c = body[k];
                int v;
                if (c >= '0' && c <= '9') v = c - '0';
                else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
                else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
                else return std::string_view::npos;
                cp = cp * 16 + v;
                ok = true;
            }
        } else {
            for (size_t k = 1; k < body.size(); ++k) {
                if (!is_ascii_digit(body[k])) return std::string_view::npos;
                cp = cp * 10 + (body[k] - '0');
                ok = true;
            }
        }
        if (!ok || cp > 0x10FFFF) return std::string_view::npos;
        if (cp == '\n' || cp == '\t') {
            out.push_back(' ');
        } else if (cp >= 0x20) {
            utf8_append(out, cp);
        }
        return semi + 1;
    }
    const auto it = entity_table().find(std::string(body));
    if (it == entity_table().end()) return std::string_view::npos;
    out += it->second;
    return semi + 1;
}

std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (size_t i = 0; i < s.size();) {
        if (s[i] == '&') {
            const size_t next = decode_entity(s, i, out);
            if (next != std::string_view::npos) {
                i = next;
                continue;
            }
        }
        out.push_back(s[i++]);
    }
    return out;
}

// --- Phase 1: comments and HTML-ish tags ----------------------------------

bool tag_name_at(std::string_view s, size_t i, std::string& name, bool& closing,
                 size_t& body_start) {
    // i points at '<'. Returns false if this is not tag-like.
    size_t j = i + 1;
    closing = false;
    if (j < s.size() && s[j] == '/') {
        closing = true;
        ++j;
    }
    const size_t name_start = j;
    while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])))) ++j;
    if (j == name_start) return false;
    name = ascii_lower(s.substr(name_start, j - name_start));
    body_start = j;
    return true;
}

std::string strip_tags_and_comments(std::string_view s, StripReport& report) {
    std::string out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (c == '<') {
            if (starts_with(s.substr(i), "<!--")) {
                const size_t end = s.find("-->", i + 4);
                if (end == std::string_view::npos) {
                    ++report.unbalanced;
                    break;  // comment swallows the rest
                }
                i = end + 3;
                continue;
            }
            std::string name;
            bool closing;
            size_t body_start;
            if (tag_name_at(s, i, name, closing, body_start)) {
                const size_t gt = s.find('>', body_start);
                if (gt != std::string_view::npos) {
                    const bool self_closing = gt > i && s[gt - 1] == '/';
                    i = gt + 1;
                    if (name == "br") {
                        out.push_back('\n');
                    } else if (!closing && !self_closing && drop_whole_elements().count(name)) {
                        // Skip content up to the matching close tag.
                        const std::string close = "</" + name;
                        size_t k = i;
                        size_t found = std::string_view::npos;
                        while (k < s.size()) {
                            const size_t cand = s.find('<', k);
                            if (cand == std::string_view::npos) break;
                            if (iequals_ascii(s.substr(cand, close.size()), close)) {
                                found = cand;
                                break;
                            }
                            k = cand + 1;
                        }
                        if (found == std::string_view::npos) {
                            ++report.unbalanced;
                            i = s.size();  // unterminated element swallows the rest
                        } else {
                            const size_t close_gt = s.find('>', found);
                            i = close_gt == std::string_view::npos ? s.size() : close_gt + 1;
                        }
                    }
                    // Other tags: stripped, content kept.
                    continue;
                }
            }
            out.push_back(c);
            ++i;
            continue;
        }
        out.push_back(c);
        ++i;
    }
    return out;
}

// --- Phase 2: templates ----------------------------------------------------

// Finds the matching "}}" for the "{{" at `open_pos` counting {{ / }} tokens.
// Returns position past the closer, or npos when unmatched or nested deeper
// than the cap.
size_t match_template(std::string_view s, size_t open_pos) {
    int depth = 1;
    size_t i = open_pos + 2;
    while (i < s.size()) {
        if (i + 1 < s.size() && s[i] == '{' && s[i + 1] == '{') {
            if (++depth > kTemplateNestingCap) return std::string_view::npos;
            i += 2;
        } else if (i + 1 < s.size() && s[i] == '}' && s[i + 1] == '}') {
            if (--depth == 0) return i + 2;
            i += 2;
        } else {
            ++i;
        }
    }
    return std::string_view::npos;
}

std::string remove_templates(std::string_view s, StripReport& report) {
    std::string out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) {
        if (i + 1 < s.size() && s[i] == '{' && s[i + 1] == '{') {
            const size_t end = match_template(s, i);
            if (end != std::string_view::npos) {
                i = end;
                continue;
            }
            // Unmatched or over-nested: keep content, drop the marker later.
            ++report.unbalanced;
            i += 2;
            continue;
        }
        if (i + 1 < s.size() && s[i] == '}' && s[i + 1] == '}') {
            // Stray closer left over from best-effort recovery above.
            i += 2;
            continue;
        }
        out.push_back(s[i]);
        ++i;
    }
    return out;
}

// --- Phase 3: tables --------------------------------------------------------

bool line_opens_table(std::string_view line) {
    size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == ':')) ++i;
    return i + 1 < line.size() && line[i] == '{' && line[i + 1] == '|';
}

bool line_closes_table(std::string_view line) {
    size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    return i + 1 < line.size() && line[i] == '|' && line[i + 1] == '}';
}

std::string remove_tables(std::string_view s, StripReport& report) {
    std::string out;
    out.reserve(s.size());
    size_t pos = 0;
    int depth = 0;
    while (pos <= s.size()) {
        const size_t eol = s.find('\n', pos);
        const std::string_view line =
            s.substr(pos, eol == std::string_view::npos ? s.size() - pos : eol - pos);
        if (depth == 0) {
            if (line_opens_table(line)) {
                depth = 1;
            } else {
                out.append(line);
                if (eol != std::string_view::npos) out.push_back('\n');
            }
        } else {
            if (line_opens_table(line)) {
                ++depth;
            } else if (line_closes_table(line)) {
                --depth;
            }
        }
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }
    if (depth > 0) ++report.unbalanced;
    return out;
}

// --- Phase 4: lines, inline markup and span tracking ------------------------

// Output writer that collapses whitespace (space runs to one space, blank
// line runs to one blank line, no leading/trailing whitespace) while letting
// the caller pin span offsets at the exact emit position. Parentheses whose
// content vanished with removed markup ("Zagreb ()" after template removal)
// are rolled back, unless a link span was recorded inside them.
class Writer {
  public:
    void put(char32_t cp) {
        if (cp == '\n') {
            newline();
            return;
        }
        if (is_space(cp)) {
            pending_space_ = true;
            return;
        }
        if (cp == ')') {
            if (try_drop_empty_parens()) return;
            pending_space_ = false;  // no space before a closing paren
        }
        flush();
        if (cp == '(') parens_.push_back({out_.size(), anchors_});
        utf8_append(out_, cp);
    }

    void put_text(std::string_view chunk) {
        for (size_t i = 0; i < chunk.size();) put(utf8_next(chunk, i));
    }

    void newline(int count = 1) {
        parens_.clear();
        if (out_.empty()) return;  // no leading blank lines
        pending_space_ = false;
        pending_newlines_ = std::min(2, std::max(pending_newlines_, count));
    }

    // Emits `anchor` as one uninterrupted chunk and returns its [start, end)
    // offsets in the output. The anchor must already be whitespace-collapsed.
    std::pair<size_t, size_t> put_anchor(std::string_view anchor) {
        flush();
        ++anchors_;
        const size_t start = out_.size();
        out_.append(anchor);
        return {start, out_.size()};
    }

    std::string take() {
        while (!out_.empty() && (out_.back() == ' ' || out_.back() == '\n')) out_.pop_back();
        return std::move(out_);
    }

  private:
    struct ParenMark {
        size_t out_len;   // length just before the '('
        size_t anchors;   // spans recorded so far
    };

    bool try_drop_empty_parens() {
        if (parens_.empty()) return false;
        const ParenMark mark = parens_.back();
        if (anchors_ != mark.anchors) {
            // A span lives inside; the parens stay.
            parens_.pop_back();
            return false;
        }
        for (size_t i = mark.out_len + 1; i < out_.size(); ++i) {
            if (out_[i] != ' ') {
                parens_.pop_back();
                return false;
            }
        }
        parens_.pop_back();
        out_.resize(mark.out_len);
        if (!out_.empty() && out_.back() == ' ') {
            out_.pop_back();
            pending_space_ = true;
        }
        return true;
    }

    void flush() {
        if (pending_newlines_ > 0) {
            out_.append(static_cast<size_t>(pending_newlines_), '\n');
            pending_newlines_ = 0;
        } else if (pending_space_ && !out_.empty() && out_.back() != '\n' &&
                   out_.back() != '(') {
            out_.push_back(' ');
        }
        pending_space_ = false;
    }

    std::string out_;
    std::vector<ParenMark> parens_;
    size_t anchors_ = 0;
    int pending_newlines_ = 0;
    bool pending_space_ = false;
};

// Collapses all whitespace in `s` to single spaces and trims the ends;
// anchors must not span lines in the output.
std::string collapse_ws(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending = false;
    for (size_t i = 0; i < s.size();) {
        const char32_t cp = utf8_next(s, i);
        if (is_space(cp)) {
            pending = !out.empty();
        } else {
            if (pending) out.push_back(' ');
            pending = false;
            utf8_append(out, cp);
        }
    }
    return out;
}

// Strips quote markup ('' and ''') and stray brackets from link display text.
std::string plain_inline(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (size_t i = 0; i < s.size();) {
        if (s[i] == '\'' && i + 1 < s.size() && s[i + 1] == '\'') {
            while (i < s.size() && s[i] == '\'') ++i;
            continue;
        }
        if (i + 1 < s.size() && ((s[i] == '[' && s[i + 1] == '[') ||
                                 (s[i] == ']' && s[i + 1] == ']'))) {
            i += 2;
            continue;
        }
        out.push_back(s[i++]);
    }
    return collapse_ws(decode_entities(out));
}

// MediaWiki pipe trick: [[Foo (bar)|]] renders "Foo".
std::string pipe_trick(std::string_view target, const std::set<std::string>* extra) {
    std::string t(trim(target));
    const size_t hash = t.find('#');
    if (hash != std::string::npos) t.resize(hash);
    if (!t.empty() && t.back() == ')') {
        const size_t open = t.rfind(" (");
        if (open != std::string::npos) t.resize(open);
    }
    const size_t colon = t.find(':');
    if (colon != std::string::npos && is_namespace_prefix(t.substr(0, colon), extra)) {
        t.erase(0, colon + 1);
    }
    return trim(t);
}

struct InlineRenderer {
    Writer& writer;
    std::vector<LinkSpan>& links;
    StripReport& report;
    const std::set<std::string>* extra_namespaces;

    void render(std::string_view line) {
        size_t i = 0;
        while (i < line.size()) {
            const char c = line[i];
            if (c == '[' && i + 1 < line.size() && line[i + 1] == '[') {
                const size_t consumed = try_internal_link(line.substr(i));
                if (consumed > 0) {
                    i += consumed;
                    continue;
                }
                // Stray opener: drop the marker, keep scanning the content.
                ++report.unbalanced;
                i += 2;
                continue;
            }
            if (c == ']' && i + 1 < line.size() && line[i + 1] == ']') {
                ++report.unbalanced;
                i += 2;
                continue;
            }
            if (c == '[') {
                const size_t consumed = try_external_link(line.substr(i));
                if (consumed > 0) {
                    i += consumed;
                    continue;
                }
            }
            if (c == '\'' && i + 1 < line.size() && line[i + 1] == '\'') {
                while (i < line.size() && line[i] == '\'') ++i;
                continue;
            }
            if (c == '&') {
                std::string decoded;
                const size_t next = decode_entity(line, i, decoded);
                if (next != std::string_view::npos) {
                    writer.put_text(decoded);
                    i = next;
                    continue;
                }
            }
            if (c == '_' && starts_with(line.substr(i), "__")) {
                const size_t end = magic_word_end(line, i);
                if (end > 0) {
                    i = end;
                    continue;
                }
            }
            size_t ci = i;
            const char32_t cp = utf8_next(line, ci);
            writer.put(cp);
            i = ci;
        }
    }

    // __TOC__ style behavior switches.
    static size_t magic_word_end(std::string_view line, size_t i) {
        size_t j = i + 2;
        while (j < line.size() && (std::isupper(static_cast<unsigned char>(line[j])) || line[j] == '_')) {
            if (line[j] == '_' && j + 1 < line.size() && line[j + 1] == '_') {
                return j > i + 2 ? j + 2 : 0;
            }
            ++j;
        }
        return 0;
    }

    // Returns consumed byte count, or 0 when the construct cannot be parsed
    // as a link (caller then recovers).
    size_t try_internal_link(std::string_view s) {
        // s starts with "[[". Find the matching "]]"; a nested "[[" before it
        // means this opener cannot be a plain link.
        size_t i = 2;
        int depth = 1;
        size_t close = std::string_view::npos;
        bool nested = false;
        while (i < s.size()) {
            if (i + 1 < s.size() && s[i] == '[' && s[i + 1] == '[') {
                nested = true;
                ++depth;
                i += 2;
            } else if (i + 1 < s.size() && s[i] == ']' && s[i + 1] == ']') {
                if (--depth == 0) {
                    close = i;
                    break;
                }
                i += 2;
            } else {
                ++i;
            }
        }
        if (close == std::string_view::npos) return 0;

        const std::string_view body = s.substr(2, close - 2);
        const size_t pipe = body.find('|');
        std::string_view target_part = body.substr(0, pipe);
        std::string_view display =
            pipe == std::string_view::npos ? std::string_view{} : body.substr(pipe + 1);

        std::string target_text(trim(target_part));
        const bool colon_trick = !target_text.empty() && target_text.front() == ':';
        if (colon_trick) target_text.erase(0, 1);

        const size_t colon = target_text.find(':');
        if (colon != std::string::npos &&
            is_namespace_prefix(std::string_view(target_text).substr(0, colon),
                                extra_namespaces)) {
            ++report.namespace_links;
            return close + 2;  // dropped entirely, caption included
        }
        if (nested) return 0;  // nested non-file link: treat opener as stray

        std::string anchor;
        if (pipe == std::string_view::npos) {
            anchor = collapse_ws(decode_entities(target_text));
        } else if (trim(display).empty()) {
            anchor = collapse_ws(pipe_trick(target_text, extra_namespaces));
        } else {
            anchor = plain_inline(display);
        }

        const std::string target = normalize_title(target_text);
        if (anchor.empty()) anchor = target_to_display(target);
        if (anchor.empty()) return close + 2;  // nothing to render

        const auto [start, end] = writer.put_anchor(anchor);
        if (!target.empty()) {
            links.push_back({start, end, target, anchor});
        }
        return close + 2;
    }

    static std::string target_to_display(std::string_view target) {
        std::string out(target);
        std::replace(out.begin(), out.end(), '_', ' ');
        return out;
    }

    size_t try_external_link(std::string_view s) {
        // s starts with '['. Only URL-scheme brackets are link syntax.
        const std::string_view rest = s.substr(1);
        if (!(starts_with(rest, "http://") || starts_with(rest, "https://") ||
              starts_with(rest, "ftp://") || starts_with(rest, "//"))) {
            return 0;
        }
        const size_t close = s.find(']');
        if (close == std::string_view::npos) return 0;
        const std::string_view body = s.substr(1, close - 1);
        const size_t space = body.find(' ');
        if (space != std::string_view::npos) {
            const std::string label = plain_inline(body.substr(space + 1));
            writer.put_text(label);
        }
        // Bare [url] renders as a footnote marker; dropped here.
        return close + 1;
    }
};

bool is_heading(std::string_view line, std::string& text) {
    if (line.size() < 3 || line.front() != '=') return false;
    size_t lead = 0;
    while (lead < line.size() && line[lead] == '=') ++lead;
    size_t tail_end = line.size();
    while (tail_end > 0 && (line[tail_end - 1] == ' ' || line[tail_end - 1] == '\t')) --tail_end;
    size_t tail = 0;
    while (tail_end > tail && line[tail_end - 1 - tail] == '=') ++tail;
    if (lead > 6 || tail == 0 || lead + tail >= tail_end) return false;
    text = trim(line.substr(lead, tail_end - tail - lead));
    return true;
}

}  // namespace

std::string normalize_title(std::string_view raw) {
    std::string t(raw);
    const size_t hash = t.find('#');
    if (hash != std::string::npos) t.resize(hash);
    if (t.find('%') != std::string::npos) t = percent_decode(t);
    t = decode_entities(t);

    std::string collapsed;
    collapsed.reserve(t.size());
    bool pending = false;
    for (size_t i = 0; i < t.size();) {
        const char32_t cp = utf8_next(t, i);
        if (is_space(cp) || cp == '_') {
            pending = !collapsed.empty();
        } else {
            if (pending) collapsed.push_back('_');
            pending = false;
            utf8_append(collapsed, cp);
        }
    }
    if (collapsed.empty()) return collapsed;

    std::string out;
    size_t i = 0;
    const char32_t first = utf8_next(collapsed, i);
    utf8_append(out, to_upper(first));
    out.append(collapsed, i, std::string::npos);
    return out;
}

bool is_redirect_wikitext(std::string_view wikitext) {
    size_t i = 0;
    while (i < wikitext.size() && std::isspace(static_cast<unsigned char>(wikitext[i]))) ++i;
    return iequals_ascii(wikitext.substr(i, 9), "#redirect");
}

LinkedDocument strip_and_link(const RawArticle& article, StripReport* report,
                              const std::set<std::string>* extra_namespaces) {
    StripReport local;
    StripReport& rep = report ? *report : local;

    std::string s = strip_tags_and_comments(article.wikitext, rep);
    s = remove_templates(s, rep);
    s = remove_tables(s, rep);

    LinkedDocument doc;
    doc.page_id = article.page_id;
    doc.title = article.title;

    Writer writer;
    InlineRenderer inliner{writer, doc.links, rep, extra_namespaces};

    size_t pos = 0;
    while (pos <= s.size()) {
        const size_t eol = s.find('\n', pos);
        std::string_view line(s.data() + pos,
                              (eol == std::string::npos ? s.size() : eol) - pos);

        std::string heading;
        if (is_heading(line, heading)) {
            writer.newline();
            inliner.render(heading);
            writer.newline();
        } else {
            size_t start = 0;
            while (start < line.size() &&
                   (line[start] == '*' || line[start] == '#' || line[start] == ':' ||
                    line[start] == ';')) {
                ++start;
            }
            if (start > 0) {
                // List/indent item: marker stripped, body on its own line.
                line.remove_prefix(start);
                writer.newline();
                inliner.render(line);
                writer.newline();
            } else if (!line.empty() && (line[0] == '|' || starts_with(line, "----"))) {
                // Orphan table row (unterminated table) or horizontal rule.
                if (line[0] == '|') ++rep.unbalanced;
            } else if (line.empty()) {
                writer.newline(2);  // paragraph break
            } else {
                inliner.render(line);
                writer.newline();
            }
        }
        if (eol == std::string::npos) break;
        pos = eol + 1;
    }

    doc.text = writer.take();
    return doc;
}

}  // namespace nerforge
