// Stage orchestration: extract -> link -> build -> stats -> gazetteer ->
// augment -> final-stats, with a manifest that makes interrupted runs
// resumable and every stage independently invokable.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nerforge/sparql.hpp"

namespace nerforge {

// Usage/config problems; the CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PipelineConfig {
    std::string language = "en";
    std::filesystem::path dump_path;
    std::string endpoint;  // empty: NER_FORGE_ENDPOINT or the DBpedia default
    std::filesystem::path cache_path;  // empty: <out_dir>/cache.jsonl
    std::filesystem::path priorities_path;
    std::filesystem::path uner_map_path;
    std::filesystem::path out_dir;
    size_t articles_per_file = 100;
    size_t files_per_folder = 100;
    size_t max_in_flight = 4;
    int min_delay_ms = 100;
    uint64_t seed = 42;
    size_t workers = 0;  // 0 = automatic
    bool augment = true;
    std::string stop_after;  // empty = run all stages

    std::string resolved_endpoint() const;
    std::filesystem::path resolved_cache_path() const;

    std::filesystem::path documents_path() const { return out_dir / "documents.jsonl"; }
    std::filesystem::path entities_path() const { return out_dir / "entities.txt"; }
    std::filesystem::path corpus_dir() const { return out_dir / "corpus"; }
    std::filesystem::path augmented_dir() const { return out_dir / "corpus_augmented"; }
    std::filesystem::path stats_initial_path() const { return out_dir / "stats_initial.json"; }
    std::filesystem::path stats_final_path() const { return out_dir / "stats_final.json"; }
    std::filesystem::path gazetteer_path() const { return out_dir / "gazetteer.tsv"; }
    std::filesystem::path manifest_path() const { return out_dir / "manifest.json"; }
    std::filesystem::path delta_report_path() const { return out_dir / "delta_report.json"; }

    // Throws ConfigError: paths must be set and distinct, counts >= 1,
    // mapping/dump files must exist where the requested stages need them.
    void validate(bool needs_dump = true, bool needs_tables = true) const;
};

extern const char* const kStageNames[];  // extract, link, build, stats, gazetteer,
                                         // augment, final-stats
constexpr size_t kStageCount = 7;

struct StageResult {
    std::string name;
    std::string outcome;  // "run", "resumed" (skipped, already done) or "gated"
    uint64_t duration_ms = 0;
    std::map<std::string, uint64_t> counters;
};

struct RunReport {
    std::vector<StageResult> stages;
    std::vector<std::string> mapping_gaps;
};

// Runs all stages (honoring stop_after), skipping stages the manifest marks
// complete whose outputs still exist. `force` redoes everything.
RunReport run_pipeline(const PipelineConfig& config, bool force = false);

// Single-stage entry points used by the CLI subcommands. Each validates its
// own inputs and updates the manifest.
StageResult run_stage(const PipelineConfig& config, const std::string& stage, bool force = true);

}  // namespace nerforge
