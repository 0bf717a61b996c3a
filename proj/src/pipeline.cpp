#include "nerforge/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <thread>

#include <json.hpp>

#include "nerforge/annotate.hpp"
#include "nerforge/article.hpp"
#include "nerforge/corpus.hpp"
#include "nerforge/dump_reader.hpp"
#include "nerforge/gazetteer.hpp"
#include "nerforge/mapping.hpp"
#include "nerforge/stats.hpp"
#include "nerforge/wikitext.hpp"

namespace nerforge {

using nlohmann::json;

const char* const kStageNames[] = {"extract", "link",    "build",      "stats",
                                   "gazetteer", "augment", "final-stats"};

std::string PipelineConfig::resolved_endpoint() const {
    if (!endpoint.empty()) return endpoint;
    if (const char* env = std::getenv("NER_FORGE_ENDPOINT"); env && *env) return env;
    return "https://dbpedia.org/sparql";
}

std::filesystem::path PipelineConfig::resolved_cache_path() const {
    return cache_path.empty() ? out_dir / "cache.jsonl" : cache_path;
}

void PipelineConfig::validate(bool needs_dump, bool needs_tables) const {
    if (out_dir.empty()) throw ConfigError("out_dir is required");
    if (articles_per_file < 1) throw ConfigError("articles_per_file must be >= 1");
    if (files_per_folder < 1) throw ConfigError("files_per_folder must be >= 1");
    if (max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
    if (min_delay_ms < 0) throw ConfigError("min_delay_ms must be >= 0");

    if (needs_dump) {
        if (dump_path.empty()) throw ConfigError("dump_path is required");
        if (!std::filesystem::exists(dump_path)) {
            throw ConfigError("dump file does not exist: " + dump_path.string());
        }
    }
    if (needs_tables) {
        for (const auto* p : {&priorities_path, &uner_map_path}) {
            if (p->empty()) throw ConfigError("both mapping table paths are required");
            if (!std::filesystem::exists(*p)) {
                throw ConfigError("mapping file does not exist: " + p->string());
            }
        }
    }

    std::set<std::filesystem::path> distinct;
    for (const auto& p : {dump_path, resolved_cache_path(), priorities_path, uner_map_path,
                          std::filesystem::path(out_dir)}) {
        if (p.empty()) continue;
        if (!distinct.insert(p.lexically_normal()).second) {
            throw ConfigError("configured paths must be distinct: " + p.string());
        }
    }
    if (!stop_after.empty()) {
        const auto* end = kStageNames + kStageCount;
        if (std::find(kStageNames, end, stop_after) == end) {
            throw ConfigError("unknown stage for --stop-after: " + stop_after);
        }
    }
}

namespace {

size_t resolve_workers(size_t configured) {
    if (configured > 0) return configured;
    const unsigned hw = std::thread::hardware_concurrency();
    return std::clamp<size_t>(hw == 0 ? 1 : hw, 1, 8);
}

// Ordered parallel map: output[i] = fn(items[i]), computed on `workers`
// threads, results kept in input order.
template <typename In, typename Out, typename Fn>
std::vector<Out> parallel_map(const std::vector<In>& items, size_t workers, Fn fn) {
    std::vector<Out> out(items.size());
    if (items.empty()) return out;
    workers = std::min(workers, items.size());
    if (workers <= 1) {
        for (size_t i = 0; i < items.size(); ++i) out[i] = fn(items[i]);
        return out;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const size_t i = next.fetch_add(1);
                if (i >= items.size()) return;
                out[i] = fn(items[i]);
            }
        });
    }
    for (std::thread& t : pool) t.join();
    return out;
}

// --- Manifest ---------------------------------------------------------------

class Manifest {
  public:
    static Manifest load(const std::filesystem::path& path) {
        Manifest m;
        m.path_ = path;
        std::ifstream in(path, std::ios::binary);
        if (in) {
            try {
                m.data_ = json::parse(in);
            } catch (const std::exception&) {
                m.data_ = json::object();  // corrupt manifest: start over
            }
        }
        if (!m.data_.is_object()) m.data_ = json::object();
        if (!m.data_.contains("stages")) m.data_["stages"] = json::object();
        return m;
    }

    bool stage_done(const std::string& stage) const {
        const auto& stages = data_.at("stages");
        return stages.contains(stage) && stages.at(stage).value("status", "") == "done";
    }

    void record_stage(const StageResult& result) {
        json counters = json::object();
        for (const auto& [k, v] : result.counters) counters[k] = v;
        data_["stages"][result.name] = {{"status", "done"},
                                        {"duration_ms", result.duration_ms},
                                        {"counters", counters}};
        save();
    }

    void clear_stage(const std::string& stage) {
        if (data_["stages"].contains(stage)) {
            data_["stages"].erase(stage);
            save();
        }
    }

    void set_mapping_gaps(const std::vector<std::string>& gaps) {
        data_["mapping_gaps"] = gaps;
        save();
    }

    std::vector<std::string> mapping_gaps() const {
        if (!data_.contains("mapping_gaps")) return {};
        return data_.at("mapping_gaps").get<std::vector<std::string>>();
    }

  private:
    void save() const {
        const std::filesystem::path tmp = path_.string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary);
            if (!out) throw std::runtime_error("cannot write manifest: " + path_.string());
            out << data_.dump(2) << "\n";
        }
        std::filesystem::rename(tmp, path_);
    }

    std::filesystem::path path_;
    json data_;
};

// --- Stage implementations ----------------------------------------------------

using Counters = std::map<std::string, uint64_t>;

// Articles processed per parallel batch; bounds stage memory to a batch of
// stripped documents rather than the whole dump.
constexpr size_t kArticleBatch = 256;

Counters stage_extract(const PipelineConfig& config) {
    std::ifstream in(config.dump_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dump file: " + config.dump_path.string());
    DumpReader reader(in, config.language);
    const size_t workers = resolve_workers(config.workers);

    std::filesystem::create_directories(config.out_dir);
    std::ofstream doc_out(config.documents_path(), std::ios::binary);
    if (!doc_out) throw std::runtime_error("cannot write " + config.documents_path().string());

    // Documents keep the reader's order (standard exports are page-id
    // ordered), which makes the stage boundary deterministic for a dump.
    uint64_t empty_or_redirect = 0;
    uint64_t documents = 0;
    StripReport strip_report;
    std::set<std::string> entities;
    bool drained = false;
    while (!drained) {
        std::vector<RawArticle> batch;
        while (batch.size() < kArticleBatch) {
            auto art = reader.next();
            if (!art) {
                drained = true;
                break;
            }
            if (art->is_redirect || art->wikitext.empty()) {
                ++empty_or_redirect;  // redirect pages produce no document
                continue;
            }
            batch.push_back(std::move(*art));
        }

        const std::set<std::string>& dump_namespaces = reader.declared_namespaces();
        std::mutex report_mu;
        const std::vector<LinkedDocument> docs = parallel_map<RawArticle, LinkedDocument>(
            batch, workers, [&](const RawArticle& art) {
                StripReport local;
                LinkedDocument doc = strip_and_link(art, &local, &dump_namespaces);
                std::lock_guard lock(report_mu);
                strip_report += local;
                return doc;
            });
        for (const LinkedDocument& doc : docs) {
            doc_out << document_to_jsonl(doc) << '\n';
            for (const LinkSpan& link : doc.links) entities.insert(link.target);
        }
        documents += docs.size();
    }
    doc_out.close();

    {
        std::ofstream out(config.entities_path(), std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + config.entities_path().string());
        for (const std::string& title : entities) out << title << '\n';
    }

    const DumpStats& ds = reader.stats();
    return {{"pages_seen", ds.pages_seen},
            {"articles", ds.articles},
            {"skipped_namespace", ds.skipped_namespace},
            {"skipped_redirect_or_empty", empty_or_redirect},
            {"documents", documents},
            {"unique_entities", entities.size()},
            {"unbalanced_markup", strip_report.unbalanced},
            {"dropped_namespace_links", strip_report.namespace_links}};
}

std::vector<std::string> read_entity_list(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read entity list: " + path.string());
    std::vector<std::string> titles;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) titles.push_back(line);
    }
    return titles;
}

Counters stage_link(const PipelineConfig& config) {
    const std::vector<std::string> titles = read_entity_list(config.entities_path());

    ClassCache cache = ClassCache::load(config.resolved_cache_path());
    cache.attach(config.resolved_cache_path());

    SparqlOptions options;
    options.endpoint = config.resolved_endpoint();
    const SparqlClient client(options);
    LinkBudget budget;
    budget.max_in_flight = config.max_in_flight;
    budget.min_delay_ms = config.min_delay_ms;

    const LinkReport report = link_all(titles, client, cache, budget);
    return {{"titles", titles.size()},
            {"already_cached", report.already_cached},
            {"fetched", report.fetched},
            {"found", report.found},
            {"not_found", report.not_found},
            {"errors", report.errors},
            {"requests_issued", client.requests_issued()}};
}

void require_stage_input(const std::filesystem::path& path, const std::string& hint) {
    if (!std::filesystem::exists(path)) {
        throw std::runtime_error(path.string() + " is missing; run the " + hint +
                                 " stage first");
    }
}

Counters stage_build(const PipelineConfig& config, Manifest& manifest) {
    const PriorityTable priorities = load_priority_table(config.priorities_path.string());
    const UnerMapping mapping = load_uner_mapping(config.uner_map_path.string());
    validate_tables(priorities, mapping);

    require_stage_input(config.resolved_cache_path(), "link");
    const ClassCache cache = ClassCache::load(config.resolved_cache_path());

    MappingGapLog gaps;
    EntityTagMap tags;
    uint64_t untagged_entities = 0;
    for (const auto& [title, record] : cache.records()) {
        if (record.status != QueryStatus::kFound) {
            ++untagged_entities;
            continue;
        }
        const auto tag = tag_entity(record.classes, priorities, mapping, &gaps);
        if (tag) {
            tags.emplace(title, tag->rendered());
        } else {
            ++untagged_entities;
        }
    }

    std::ifstream doc_in(config.documents_path(), std::ios::binary);
    if (!doc_in) {
        throw std::runtime_error("cannot read " + config.documents_path().string());
    }

    std::filesystem::remove_all(config.corpus_dir());
    CorpusWriter writer(config.corpus_dir(), config.articles_per_file, config.files_per_folder);
    const size_t workers = resolve_workers(config.workers);

    AnnotateReport annotate_report;
    uint64_t documents = 0;
    uint64_t sentences = 0;
    bool drained = false;
    while (!drained) {
        std::vector<LinkedDocument> batch;
        std::string line;
        while (batch.size() < kArticleBatch) {
            if (!std::getline(doc_in, line)) {
                drained = true;
                break;
            }
            if (line.empty()) continue;
            batch.push_back(document_from_jsonl(line));
        }

        std::mutex report_mu;
        const std::vector<std::vector<TaggedSentence>> per_doc =
            parallel_map<LinkedDocument, std::vector<TaggedSentence>>(
                batch, workers, [&](const LinkedDocument& doc) {
                    AnnotateReport local;
                    auto doc_sentences = annotate_document(doc, tags, &local);
                    std::lock_guard lock(report_mu);
                    annotate_report.clipped_spans += local.clipped_spans;
                    annotate_report.untagged_spans += local.untagged_spans;
                    return doc_sentences;
                });
        for (const auto& article_sentences : per_doc) {
            writer.add_article(article_sentences);
            sentences += article_sentences.size();
        }
        documents += batch.size();
    }
    writer.finish();

    manifest.set_mapping_gaps(gaps.gaps());
    return {{"documents", documents},
            {"tagged_entities", tags.size()},
            {"untagged_entities", untagged_entities},
            {"sentences", sentences},
            {"files", writer.files_written()},
            {"folders", writer.folders_written()},
            {"clipped_spans", annotate_report.clipped_spans},
            {"untagged_spans", annotate_report.untagged_spans},
            {"mapping_gaps", gaps.gaps().size()}};
}

Counters stage_stats(const PipelineConfig& config) {
    require_stage_input(config.corpus_dir(), "build");
    CorpusStats stats = compute_stats(config.corpus_dir());
    write_stats_file(config.stats_initial_path(), stats);
    return {{"total_tokens", stats.total_tokens},
            {"entity_tokens", stats.entity_tokens},
            {"entity_count", stats.entity_count},
            {"distinct_tags", stats.per_tag.size()}};
}

Counters stage_gazetteer(const PipelineConfig& config) {
    require_stage_input(config.corpus_dir(), "build");
    const Gazetteer gazetteer = build_gazetteer(config.corpus_dir());
    write_gazetteer(config.gazetteer_path(), gazetteer);
    return {{"entries", gazetteer.size()}};
}

Counters stage_augment(const PipelineConfig& config) {
    require_stage_input(config.corpus_dir(), "build");
    require_stage_input(config.gazetteer_path(), "gazetteer");
    const Gazetteer gazetteer = read_gazetteer(config.gazetteer_path());
    std::filesystem::remove_all(config.augmented_dir());
    const AugmentDelta delta = augment_corpus(config.corpus_dir(), config.augmented_dir(),
                                              gazetteer);
    return {{"matches_applied", static_cast<uint64_t>(delta.entity_count)},
            {"tokens_relabeled", static_cast<uint64_t>(delta.entity_tokens)}};
}

Counters stage_final_stats(const PipelineConfig& config) {
    require_stage_input(config.stats_initial_path(), "stats");
    require_stage_input(config.augmented_dir(), "augment");
    const CorpusStats before = read_stats_file(config.stats_initial_path());
    CorpusStats after = compute_stats(config.augmented_dir());
    write_stats_file(config.stats_final_path(), after);
    {
        std::ofstream out(config.delta_report_path(), std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write " + config.delta_report_path().string());
        }
        out << delta_report_json(before, after);
    }
    return {{"total_tokens", after.total_tokens},
            {"entity_tokens", after.entity_tokens},
            {"entity_count", after.entity_count}};
}

// Outputs that must exist for a stage to count as already done.
std::vector<std::filesystem::path> stage_outputs(const PipelineConfig& config,
                                                 const std::string& stage) {
    if (stage == "extract") return {config.documents_path(), config.entities_path()};
    if (stage == "link") return {config.resolved_cache_path()};
    if (stage == "build") return {config.corpus_dir()};
    if (stage == "stats") return {config.stats_initial_path()};
    if (stage == "gazetteer") return {config.gazetteer_path()};
    if (stage == "augment") return {config.augmented_dir()};
    if (stage == "final-stats") return {config.stats_final_path(), config.delta_report_path()};
    return {};
}

bool outputs_exist(const PipelineConfig& config, const std::string& stage) {
    for (const auto& p : stage_outputs(config, stage)) {
        if (!std::filesystem::exists(p)) return false;
    }
    return true;
}

Counters dispatch_stage(const PipelineConfig& config, const std::string& stage,
                        Manifest& manifest) {
    if (stage == "extract") return stage_extract(config);
    if (stage == "link") return stage_link(config);
    if (stage == "build") return stage_build(config, manifest);
    if (stage == "stats") return stage_stats(config);
    if (stage == "gazetteer") return stage_gazetteer(config);
    if (stage == "augment") return stage_augment(config);
    if (stage == "final-stats") return stage_final_stats(config);
    throw ConfigError("unknown stage: " + stage);
}

StageResult execute_stage(const PipelineConfig& config, const std::string& stage,
                          Manifest& manifest, bool force) {
    StageResult result;
    result.name = stage;
    if (!force && manifest.stage_done(stage) && outputs_exist(config, stage)) {
        result.outcome = "resumed";
        return result;
    }
    const auto start = std::chrono::steady_clock::now();
    try {
        result.counters = dispatch_stage(config, stage, manifest);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw std::runtime_error("stage " + stage + ": " + e.what());
    }
    result.duration_ms = static_cast<uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - start)
            .count());
    result.outcome = "run";
    manifest.record_stage(result);
    return result;
}

}  // namespace

RunReport run_pipeline(const PipelineConfig& config, bool force) {
    config.validate(/*needs_dump=*/true);
    std::filesystem::create_directories(config.out_dir);
    Manifest manifest = Manifest::load(config.manifest_path());

    RunReport report;
    bool gated = false;
    for (size_t i = 0; i < kStageCount; ++i) {
        const std::string stage = kStageNames[i];
        if (gated || (!config.augment && (stage == "augment" || stage == "final-stats"))) {
            report.stages.push_back({stage, "gated", 0, {}});
            continue;
        }
        report.stages.push_back(execute_stage(config, stage, manifest, force));
        if (stage == config.stop_after) gated = true;
    }
    report.mapping_gaps = manifest.mapping_gaps();
    return report;
}

StageResult run_stage(const PipelineConfig& config, const std::string& stage, bool force) {
    config.validate(/*needs_dump=*/stage == "extract", /*needs_tables=*/stage == "build");
    std::filesystem::create_directories(config.out_dir);
    Manifest manifest = Manifest::load(config.manifest_path());
    return execute_stage(config, stage, manifest, force);
}

}  // namespace nerforge
