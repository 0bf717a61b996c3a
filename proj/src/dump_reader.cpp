#include "nerforge/dump_reader.hpp"

#include <fstream>
#include <vector>

#include <boost/iostreams/device/file.hpp>
#include <boost/iostreams/filter/bzip2.hpp>
#include <boost/iostreams/filtering_stream.hpp>

#include "nerforge/text_util.hpp"
#include "nerforge/wikitext.hpp"

namespace nerforge {

namespace {

// Replays the sniffed magic bytes, then reads from the underlying stream.
class PrefixedSource {
  public:
    typedef char char_type;
    typedef boost::iostreams::source_tag category;

    PrefixedSource(std::string prefix, std::istream* in)
        : prefix_(std::move(prefix)), in_(in) {}

    std::streamsize read(char* s, std::streamsize n) {
        if (pos_ < prefix_.size()) {
            const std::streamsize take =
                std::min<std::streamsize>(n, static_cast<std::streamsize>(prefix_.size() - pos_));
            prefix_.copy(s, take, pos_);
            pos_ += take;
            return take;
        }
        if (!in_->good()) return -1;
        in_->read(s, n);
        const std::streamsize got = in_->gcount();
        return got > 0 ? got : -1;
    }

  private:
    std::string prefix_;
    size_t pos_ = 0;
    std::istream* in_;
};

bool decode_xml_entity(std::string_view s, size_t i, std::string& out, size_t& next) {
    // s[i] == '&'. XML predefined entities plus numeric references.
    const size_t semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 10) return false;
    const std::string_view body = s.substr(i + 1, semi - i - 1);
    if (body == "lt") out.push_back('<');
    else if (body == "gt") out.push_back('>');
    else if (body == "amp") out.push_back('&');
    else if (body == "quot") out.push_back('"');
    else if (body == "apos") out.push_back('\'');
    else if (!body.empty() && body[0] == '#') {
        char32_t cp = 0;
        size_t k = 1;
        int base = 10;
        if (k < body.size() && (body[k] == 'x' || body[k] == 'X')) {
            base = 16;
            ++k;
        }
        if (k >= body.size()) return false;
        for (; k < body.size(); ++k) {
            const char c = body[k];
            int v = -1;
            if (c >= '0' && c <= '9') v = c - '0';
            else if (base == 16 && c >= 'a' && c <= 'f') v = c - 'a' + 10;
            else if (base == 16 && c >= 'A' && c <= 'F') v = c - 'A' + 10;
            if (v < 0) return false;
            cp = cp * base + v;
        }
        if (cp > 0x10FFFF) return false;
        utf8_append(out, cp);
    } else {
        return false;
    }
    next = semi + 1;
    return true;
}

std::string decode_xml_text(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (size_t i = 0; i < s.size();) {
        if (s[i] == '&') {
            size_t next;
            if (decode_xml_entity(s, i, out, next)) {
                i = next;
                continue;
            }
        }
        out.push_back(s[i++]);
    }
    return out;
}

}  // namespace

struct DumpReader::Impl {
    boost::iostreams::filtering_istream stream;
    std::string prefix;

    uint64_t offset = 0;
    uint64_t line = 1;
    bool done = false;

    std::vector<std::string> stack;  // open element names
    std::set<std::string> namespaces;  // localized names from <siteinfo>, lowercased

    // Current page assembly.
    bool in_page = false;
    std::string title;
    std::string ns_text;
    std::string id_text;
    std::string text;
    bool has_page_id = false;
    bool is_redirect = false;

    std::string capture;  // content of the element currently captured
    bool capturing = false;

    int get() {
        const int c = stream.get();
        if (c == EOF) return EOF;
        ++offset;
        if (c == '\n') ++line;
        return c;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw DumpError(what, offset, line);
    }

    // Reads one markup construct starting at '<' (already consumed by the
    // caller). Fills `name`; returns kind.
    enum class Tag { kOpen, kClose, kSelfClose, kSkip };

    Tag read_tag(std::string& name, std::string* redirect_hint) {
        int c = get();
        if (c == EOF) fail("unexpected end of file inside markup");
        if (c == '?') {  // <?xml ...?>
            int prev = 0;
            while ((c = get()) != EOF) {
                if (prev == '?' && c == '>') return Tag::kSkip;
                prev = c;
            }
            fail("unterminated processing instruction");
        }
        if (c == '!') {  // comments, doctype, CDATA unsupported-but-skipped
            std::string intro;
            intro.push_back(static_cast<char>(c));
            // Distinguish <!-- 'comment' from other declarations.
            const int c2 = get();
            if (c2 == EOF) fail("unexpected end of file in declaration");
            if (c2 == '-') {
                const int c3 = get();
                if (c3 != '-') fail("malformed comment");
                int d1 = 0, d2 = 0;
                while ((c = get()) != EOF) {
                    if (d1 == '-' && d2 == '-' && c == '>') return Tag::kSkip;
                    d1 = d2;
                    d2 = c;
                }
                fail("unterminated comment");
            }
            while ((c = get()) != EOF) {
                if (c == '>') return Tag::kSkip;
            }
            fail("unterminated declaration");
        }

        bool closing = false;
        if (c == '/') {
            closing = true;
            c = get();
        }
        if (c == EOF) fail("unexpected end of file in tag");
        if (!std::isalpha(c) && c != '_') fail("malformed tag name");

        name.clear();
        while (c != EOF && (std::isalnum(c) || c == '_' || c == '-' || c == ':' || c == '.')) {
            name.push_back(static_cast<char>(c));
            c = get();
        }

        // Attributes: scan to '>' honoring quoted values.
        bool self_close = false;
        std::string attrs;
        while (c != EOF && c != '>') {
            if (c == '"' || c == '\'') {
                const int quote = c;
                attrs.push_back(static_cast<char>(c));
                while ((c = get()) != EOF && c != quote) attrs.push_back(static_cast<char>(c));
                if (c == EOF) fail("unterminated attribute value");
                attrs.push_back(static_cast<char>(c));
                c = get();
                continue;
            }
            attrs.push_back(static_cast<char>(c));
            c = get();
        }
        if (c == EOF) fail("unexpected end of file in tag");
        if (!attrs.empty() && attrs.back() == '/') self_close = true;

        if (redirect_hint && name == "redirect") {
            *redirect_hint = attrs;
        }
        if (closing) return Tag::kClose;
        return self_close ? Tag::kSelfClose : Tag::kOpen;
    }

    const std::string& parent() const {
        static const std::string kEmpty;
        return stack.empty() ? kEmpty : stack.back();
    }
};

DumpReader::DumpReader(std::istream& in, std::string language)
    : impl_(std::make_unique<Impl>()), language_(std::move(language)) {
    char magic[3];
    in.read(magic, 3);
    const std::streamsize got = in.gcount();
    std::string prefix(magic, magic + std::max<std::streamsize>(got, 0));
    if (got == 3 && prefix == "BZh") {
        impl_->stream.push(boost::iostreams::bzip2_decompressor());
    }
    impl_->stream.push(PrefixedSource(std::move(prefix), &in));
}

DumpReader::~DumpReader() = default;

std::optional<RawArticle> DumpReader::next() {
    Impl& p = *impl_;
    if (p.done) return std::nullopt;

    while (true) {
        const int c = p.get();
        if (c == EOF) {
            if (!p.stack.empty()) {
                p.fail("unexpected end of file, <" + p.stack.back() + "> still open");
            }
            p.done = true;
            return std::nullopt;
        }
        if (c != '<') {
            if (p.capturing) {
                p.capture.push_back(static_cast<char>(c));
                stats_.peak_buffer_bytes = std::max(stats_.peak_buffer_bytes, p.capture.size());
            }
            continue;
        }

        std::string name;
        std::string redirect_attrs;
        const Impl::Tag kind = p.read_tag(name, &redirect_attrs);
        switch (kind) {
            case Impl::Tag::kSkip:
                break;

            case Impl::Tag::kSelfClose:
                if (p.in_page && name == "redirect") p.is_redirect = true;
                break;

            case Impl::Tag::kOpen: {
                if (name == "page") {
                    if (p.in_page) p.fail("nested <page>");
                    p.in_page = true;
                    p.title.clear();
                    p.ns_text.clear();
                    p.id_text.clear();
                    p.text.clear();
                    p.has_page_id = false;
                    p.is_redirect = false;
                }
                p.stack.push_back(name);
                if (p.in_page &&
                    (name == "title" || name == "ns" || name == "text" ||
                     (name == "id" && p.stack.size() >= 2 &&
                      p.stack[p.stack.size() - 2] == "page"))) {
                    p.capturing = true;
                    p.capture.clear();
                } else if (!p.in_page && name == "namespace") {
                    p.capturing = true;
                    p.capture.clear();
                }
                break;
            }

            case Impl::Tag::kClose: {
                if (p.stack.empty() || p.stack.back() != name) {
                    p.fail("mismatched closing tag </" + name + ">");
                }
                p.stack.pop_back();
                if (p.capturing) {
                    p.capturing = false;
                    if (name == "title") {
                        p.title = decode_xml_text(p.capture);
                    } else if (name == "ns") {
                        p.ns_text = trim(p.capture);
                    } else if (name == "id" && p.parent() == "page" && !p.has_page_id) {
                        p.id_text = trim(p.capture);
                        p.has_page_id = true;
                    } else if (name == "text") {
                        p.text = decode_xml_text(p.capture);
                    } else if (name == "namespace") {
                        const std::string ns_name = trim(decode_xml_text(p.capture));
                        if (!ns_name.empty()) {
                            p.namespaces.insert(utf8_to_lower(ns_name));
                        }
                    }
                    p.capture.clear();
                }
                if (name == "page") {
                    p.in_page = false;
                    ++stats_.pages_seen;
                    const int ns = p.ns_text.empty() ? 0 : std::atoi(p.ns_text.c_str());
                    if (ns != 0) {
                        ++stats_.skipped_namespace;
                        break;
                    }
                    RawArticle art;
                    art.page_id = p.id_text.empty() ? 0 : std::strtoull(p.id_text.c_str(), nullptr, 10);
                    art.title = p.title;
                    art.wikitext = std::move(p.text);
                    art.language = language_;
                    art.is_redirect = p.is_redirect || is_redirect_wikitext(art.wikitext);
                    if (art.is_redirect) ++stats_.redirects;
                    ++stats_.articles;
                    p.text.clear();
                    return art;
                }
                break;
            }
        }
    }
}

const std::set<std::string>& DumpReader::declared_namespaces() const {
    return impl_->namespaces;
}

std::vector<RawArticle> read_dump_file(const std::string& path, const std::string& language,
                                       DumpStats* stats) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dump file: " + path);
    DumpReader reader(in, language);
    std::vector<RawArticle> out;
    while (auto art = reader.next()) out.push_back(std::move(*art));
    if (stats) *stats = reader.stats();
    return out;
}

}  // namespace nerforge
