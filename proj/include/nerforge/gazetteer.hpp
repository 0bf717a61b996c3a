// Entity list (gazetteer) construction with the discard filters, and the
// annotation-increment pass that retags untagged mentions by leftmost-longest
// token-sequence matching.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "nerforge/corpus.hpp"
#include "nerforge/stats.hpp"

namespace nerforge {

struct GazetteerEntry {
    std::vector<std::string> surfaces;  // token sequence, case-sensitive
    std::string tag;                    // rendered UNER tag

    bool operator==(const GazetteerEntry&) const = default;
};

// Discard rules: single-character entities, exactly-two-lowercase-character
// entities, and all-digit entities never enter the list.
bool gazetteer_filters_out(const std::vector<std::string>& surfaces);

class Gazetteer {
  public:
    // Entries are deduplicated by surface sequence and stored sorted.
    static Gazetteer from_entries(std::vector<GazetteerEntry> entries);

    const std::vector<GazetteerEntry>& entries() const { return entries_; }
    size_t size() const { return entries_.size(); }

  private:
    std::vector<GazetteerEntry> entries_;
};

// One entry per distinct tagged token sequence in the corpus; ambiguous
// sequences collapse to the most frequent tag (ties: first encountered);
// filtered shapes are dropped.
Gazetteer build_gazetteer(const std::vector<TaggedSentence>& corpus);
Gazetteer build_gazetteer(const std::filesystem::path& corpus_root);

// TSV: `surface tokens (space-joined)<TAB>tag`.
void write_gazetteer(const std::filesystem::path& path, const Gazetteer& gazetteer);
Gazetteer read_gazetteer(const std::filesystem::path& path);

// Token-sequence matching automaton, built once per gazetteer.
class TokenMatcher {
  public:
    explicit TokenMatcher(const Gazetteer& gazetteer);
    ~TokenMatcher();
    TokenMatcher(TokenMatcher&&) noexcept;
    TokenMatcher& operator=(TokenMatcher&&) noexcept;

    struct Match {
        size_t begin = 0;  // token index
        size_t end = 0;    // exclusive
        const GazetteerEntry* entry = nullptr;
    };

    // Leftmost-longest non-overlapping matches over a token window.
    std::vector<Match> find(const std::vector<std::string>& tokens) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct AugmentDelta {
    int64_t non_entity_tokens = 0;  // <= 0
    int64_t entity_tokens = 0;      // >= 0
    int64_t entity_count = 0;
    std::map<std::string, int64_t> per_tag;

    AugmentDelta& operator+=(const AugmentDelta& o);
};

// Rewrites maximal O-runs covered by gazetteer matches to B-/I- labels.
// Never touches existing labels, never crosses sentence bounds, never
// changes a surface. Returns the number of matches applied.
size_t augment_sentence(TaggedSentence& sentence, const TokenMatcher& matcher,
                        AugmentDelta* delta = nullptr);

AugmentDelta augment(std::vector<TaggedSentence>& corpus, const Gazetteer& gazetteer);

// Tree-to-tree pass preserving the file layout under `in_root`.
AugmentDelta augment_corpus(const std::filesystem::path& in_root,
                            const std::filesystem::path& out_root, const Gazetteer& gazetteer);

// Delta report mirroring the before/after statistics tables.
std::string delta_report_json(const CorpusStats& before, const CorpusStats& after);

}  // namespace nerforge
