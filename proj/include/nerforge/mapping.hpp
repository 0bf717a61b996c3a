// The two class mappers: ontology class -> priority, and class -> UNER tag.
// Both are input data (UTF-8 TSV files); resolution picks the highest
// priority class with first-in-list tie-breaking, then translates it.
#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace nerforge {

// A hierarchical UNER tag in rendered form, levels joined with '-'
// (e.g. "Name-Event-Occasion-Game"). Kept as the rendered string because
// level-2 type names may themselves contain '-'; only the rendered form and
// its first segment matter downstream.
class UnerTag {
  public:
    UnerTag() = default;

    // Throws std::invalid_argument for malformed tags (empty segments,
    // whitespace, leading/trailing '-').
    static UnerTag parse(std::string_view rendered);

    const std::string& rendered() const { return rendered_; }
    std::string_view category() const;  // first dash-separated segment

    bool operator==(const UnerTag&) const = default;
    auto operator<=>(const UnerTag&) const = default;

  private:
    explicit UnerTag(std::string rendered) : rendered_(std::move(rendered)) {}
    std::string rendered_;
};

struct PriorityTable {
    // class CURIE -> priority >= 1; absent classes act as priority 0.
    std::map<std::string, int> entries;

    int priority_of(const std::string& class_iri) const {
        const auto it = entries.find(class_iri);
        return it == entries.end() ? 0 : it->second;
    }
};

struct UnerMapping {
    // class CURIE -> tag; NULL entries are stored as nullopt.
    std::map<std::string, std::optional<UnerTag>> entries;
};

// Collects classes seen without a mapping entry; reported once per class.
class MappingGapLog {
  public:
    void record(const std::string& class_iri);
    std::vector<std::string> gaps() const;

  private:
    mutable std::mutex mu_;
    std::set<std::string> seen_;
};

// TSV loaders: `class<TAB>priority` / `class<TAB>tag|NULL`, '#' comments,
// blank lines ignored. Duplicate keys and malformed rows are load errors
// (std::runtime_error naming file and line).
PriorityTable load_priority_table(const std::string& path);
UnerMapping load_uner_mapping(const std::string& path);

// Cross-table validation per the data contract: owl:Thing present with
// priority 1, and every prioritized class has a mapping entry.
void validate_tables(const PriorityTable& priorities, const UnerMapping& mapping);

// Highest-priority class, first-in-list tie-break; none when the input is
// empty or no class has priority >= 1.
std::optional<std::string> resolve_class(const std::vector<std::string>& classes,
                                         const PriorityTable& priorities);

std::optional<UnerTag> map_to_uner(const std::string& class_iri, const UnerMapping& mapping,
                                   MappingGapLog* gaps = nullptr);

// Composition of the two mappers over an entity's class set.
std::optional<UnerTag> tag_entity(const std::vector<std::string>& classes,
                                  const PriorityTable& priorities, const UnerMapping& mapping,
                                  MappingGapLog* gaps = nullptr);

}  // namespace nerforge
