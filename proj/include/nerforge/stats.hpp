// Corpus statistics: token/entity counts, per-tag occurrence table and the
// coarse Person/Location/Organization rollup.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "nerforge/corpus.hpp"

namespace nerforge {

struct CoarseCounts {
    uint64_t person = 0;
    uint64_t location = 0;
    uint64_t organization = 0;
    uint64_t other = 0;

    uint64_t total() const { return person + location + organization + other; }
    bool operator==(const CoarseCounts&) const = default;
};

struct CorpusStats {
    uint64_t total_tokens = 0;
    uint64_t non_entity_tokens = 0;
    uint64_t entity_tokens = 0;
    uint64_t entity_count = 0;                 // number of B- labels
    std::map<std::string, uint64_t> per_tag;   // rendered tag -> B- occurrences
    CoarseCounts coarse;

    bool operator==(const CorpusStats&) const = default;
};

// Single-sentence accumulation; throws on invalid IOB2 input.
void accumulate(CorpusStats& stats, const TaggedSentence& sentence);

CorpusStats compute_stats(const std::vector<TaggedSentence>& corpus);
CorpusStats compute_stats(const std::filesystem::path& corpus_root);

// Associative, commutative merge of partial stats.
CorpusStats merge(const CorpusStats& a, const CorpusStats& b);

// Person <- exactly Name-Person-Name; Location/Organization <- tags equal to
// or prefixed by Name-Location / Name-Organization; remainder -> Other.
CoarseCounts coarse_rollup(const std::map<std::string, uint64_t>& per_tag);

std::string stats_to_json(const CorpusStats& stats);
CorpusStats stats_from_json(const std::string& json_text);

void write_stats_file(const std::filesystem::path& path, const CorpusStats& stats);
CorpusStats read_stats_file(const std::filesystem::path& path);

}  // namespace nerforge
