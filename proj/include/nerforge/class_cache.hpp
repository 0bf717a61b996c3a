// Per-entity ontology class records with an append-friendly JSON-lines
// cache; a populated cache makes every downstream stage replayable offline.
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nerforge {

enum class QueryStatus { kFound, kNotFound, kError };

std::string to_string(QueryStatus status);
QueryStatus query_status_from_string(const std::string& s);

struct EntityClassRecord {
    std::string title;                 // normalization-canonical
    std::vector<std::string> classes;  // CURIEs, endpoint order preserved
    std::string fetched_at;            // ISO 8601 UTC
    QueryStatus status = QueryStatus::kNotFound;

    bool operator==(const EntityClassRecord&) const = default;
};

std::string record_to_jsonl(const EntityClassRecord& record);
EntityClassRecord record_from_jsonl(const std::string& line);

// Append-only during a run; lookups never touch the network.
class ClassCache {
  public:
    ClassCache() = default;

    // Missing file yields an empty cache (first run); parse errors throw.
    static ClassCache load(const std::filesystem::path& path);

    const EntityClassRecord* find(const std::string& title) const;
    bool contains(const std::string& title) const { return find(title) != nullptr; }
    size_t size() const { return records_.size(); }
    const std::map<std::string, EntityClassRecord>& records() const { return records_; }

    // Inserts and appends to the backing file (when attached), flushing the
    // line immediately so interrupted runs resume losslessly.
    void insert(EntityClassRecord record);

    // Attaches a backing file for appends; existing content must already be
    // loaded from the same path.
    void attach(const std::filesystem::path& path);

    bool operator==(const ClassCache& o) const { return records_ == o.records_; }

  private:
    std::map<std::string, EntityClassRecord> records_;
    std::filesystem::path path_;
};

}  // namespace nerforge
