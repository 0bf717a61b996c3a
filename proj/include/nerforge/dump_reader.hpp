// Streaming MediaWiki XML export reader. Pull-based: one main-namespace
// article per next() call, constant memory in dump size (the window scales
// with the largest single page, not the dump). Plain or bz2 input, detected
// by magic bytes.
#pragma once

#include <istream>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

#include "nerforge/article.hpp"

namespace nerforge {

struct DumpError : std::runtime_error {
    DumpError(const std::string& what, uint64_t byte_offset, uint64_t line)
        : std::runtime_error(what + " (offset " + std::to_string(byte_offset) +
                             ", line " + std::to_string(line) + ")"),
          byte_offset(byte_offset),
          line(line) {}

    uint64_t byte_offset;  // into the decompressed stream
    uint64_t line;
};

struct DumpStats {
    uint64_t pages_seen = 0;
    uint64_t articles = 0;           // main-namespace pages yielded
    uint64_t skipped_namespace = 0;  // non-main-namespace pages
    uint64_t redirects = 0;          // main-namespace redirect pages (yielded, flagged)
    size_t peak_buffer_bytes = 0;    // high-water of per-page buffering
};

class DumpReader {
  public:
    // The stream must outlive the reader.
    DumpReader(std::istream& in, std::string language);
    ~DumpReader();

    DumpReader(const DumpReader&) = delete;
    DumpReader& operator=(const DumpReader&) = delete;

    // Next main-namespace article, or nullopt at end of dump.
    // Throws DumpError on malformed XML.
    std::optional<RawArticle> next();

    const DumpStats& stats() const { return stats_; }

    // Localized namespace names declared in <siteinfo> (lowercased), e.g.
    // "kategorija" for a Croatian dump. Complete once the first page has
    // been read; feeds the link stripper's namespace detection.
    const std::set<std::string>& declared_namespaces() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    DumpStats stats_;
    std::string language_;
};

// Convenience for fixtures and the CLI: fully drains a dump file.
std::vector<RawArticle> read_dump_file(const std::string& path, const std::string& language,
                                       DumpStats* stats = nullptr);

}  // namespace nerforge
