// ner-forge: silver-standard NER corpus generation from MediaWiki dumps.
//
// Subcommands mirror the pipeline stages (extract, link, build, stats,
// gazetteer, augment, final-stats, sample) plus `run` for the whole thing.
// Shared options live on the top-level app and come from flags or a
// key/value config file (--config); flags override the file.
//
// Exit codes: 0 ok, 1 runtime failure, 2 usage/config error.
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nerforge/pipeline.hpp"
#include "nerforge/sample.hpp"

namespace {

using nerforge::PipelineConfig;

void print_stage(const nerforge::StageResult& result) {
    std::cout << "[" << result.outcome << "] " << result.name;
    if (result.outcome == "run") {
        std::cout << " (" << result.duration_ms << " ms)";
        for (const auto& [key, value] : result.counters) {
            std::cout << " " << key << "=" << value;
        }
    }
    std::cout << "\n";
}

int run_sample(const PipelineConfig& config, size_t n) {
    const nerforge::Gazetteer gazetteer = nerforge::read_gazetteer(config.gazetteer_path());
    const auto sample = nerforge::sample_for_review(gazetteer, n, config.seed);
    const std::filesystem::path out_path = config.out_dir / "review_sample.tsv";
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_path.string());
    for (const auto& entry : sample) {
        std::string joined;
        for (const auto& s : entry.surfaces) {
            if (!joined.empty()) joined.push_back(' ');
            joined += s;
        }
        out << joined << '\t' << entry.tag << '\n';
    }
    std::cout << "wrote " << sample.size() << " entries to " << out_path.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Silver-standard hierarchical NER corpus generation from Wikipedia/DBpedia"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Config file (key = value, flag names as keys)");

    PipelineConfig config;
    bool force = false;
    bool no_augment = false;
    size_t sample_n = 943;

    app.add_option("--language", config.language, "ISO 639-1 language code")
        ->capture_default_str();
    app.add_option("--dump", config.dump_path, "MediaWiki XML dump (plain or .bz2)");
    app.add_option("--endpoint", config.endpoint,
                   "SPARQL endpoint URL (default: NER_FORGE_ENDPOINT or DBpedia)");
    app.add_option("--cache", config.cache_path,
                   "Entity class cache file (default: <out>/cache.jsonl)");
    app.add_option("--priorities", config.priorities_path, "Class priority table (TSV)");
    app.add_option("--uner-map", config.uner_map_path, "Class to UNER tag table (TSV)");
    app.add_option("--out", config.out_dir, "Output directory");
    app.add_option("--articles-per-file", config.articles_per_file)->capture_default_str();
    app.add_option("--files-per-folder", config.files_per_folder)->capture_default_str();
    app.add_option("--max-in-flight", config.max_in_flight, "Concurrent endpoint requests")
        ->capture_default_str();
    app.add_option("--min-delay-ms", config.min_delay_ms,
                   "Minimum spacing between endpoint requests")
        ->capture_default_str();
    app.add_option("--seed", config.seed, "Random seed")->capture_default_str();
    app.add_option("--workers", config.workers, "Worker thread cap (0 = auto)")
        ->capture_default_str();
    app.add_flag("--force", force, "Redo stages even if marked done");

    for (const char* name : {"extract", "link", "build", "stats", "gazetteer", "augment",
                             "final-stats"}) {
        app.add_subcommand(name, std::string("Run the ") + name + " stage")->fallthrough();
    }
    {
        CLI::App* cmd = app.add_subcommand("run", "Run the whole pipeline");
        cmd->fallthrough();
        cmd->add_flag("--no-augment", no_augment,
                      "Skip the annotation-increment step and its statistics");
        cmd->add_option("--stop-after", config.stop_after,
                        "Stop after the named stage (extract, link, build, stats, "
                        "gazetteer, augment, final-stats)");
    }
    {
        CLI::App* cmd = app.add_subcommand("sample", "Sample gazetteer entries for review");
        cmd->fallthrough();
        cmd->add_option("--n", sample_n, "Sample size")->capture_default_str();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    config.augment = !no_augment;
    const std::string sub = app.get_subcommands().front()->get_name();
    try {
        if (sub == "run") {
            const nerforge::RunReport report = nerforge::run_pipeline(config, force);
            for (const auto& stage : report.stages) print_stage(stage);
            if (!report.mapping_gaps.empty()) {
                std::cerr << "mapping gaps (" << report.mapping_gaps.size() << "):";
                for (const auto& cls : report.mapping_gaps) std::cerr << " " << cls;
                std::cerr << "\n";
            }
        } else if (sub == "sample") {
            config.validate(false, false);
            return run_sample(config, sample_n);
        } else {
            print_stage(nerforge::run_stage(config, sub, /*force=*/true));
        }
    } catch (const nerforge::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << sub << " failed: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
