// Python bindings for the main pipeline operations.
#include <fstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "nerforge/annotate.hpp"
#include "nerforge/article.hpp"
#include "nerforge/corpus.hpp"
#include "nerforge/dump_reader.hpp"
#include "nerforge/gazetteer.hpp"
#include "nerforge/mapping.hpp"
#include "nerforge/pipeline.hpp"
#include "nerforge/sample.hpp"
#include "nerforge/sentence.hpp"
#include "nerforge/stats.hpp"
#include "nerforge/wikitext.hpp"

namespace py = pybind11;

namespace {

py::dict document_to_dict(const nerforge::LinkedDocument& doc) {
    py::list links;
    // Python strings index code points; convert so text[start:end] == anchor.
    for (const auto& span : nerforge::spans_to_codepoint_offsets(doc.text, doc.links)) {
        py::dict d;
        d["start"] = span.start;
        d["end"] = span.end;
        d["target"] = span.target;
        d["anchor"] = span.anchor;
        links.append(d);
    }
    py::dict out;
    out["page_id"] = doc.page_id;
    out["title"] = doc.title;
    out["text"] = doc.text;
    out["links"] = links;
    return out;
}

py::dict stats_to_dict(const nerforge::CorpusStats& stats) {
    py::dict per_tag;
    for (const auto& [tag, count] : stats.per_tag) per_tag[py::str(tag)] = count;
    py::dict coarse;
    coarse["Person"] = stats.coarse.person;
    coarse["Location"] = stats.coarse.location;
    coarse["Organization"] = stats.coarse.organization;
    coarse["Other"] = stats.coarse.other;
    py::dict out;
    out["total_tokens"] = stats.total_tokens;
    out["non_entity_tokens"] = stats.non_entity_tokens;
    out["entity_tokens"] = stats.entity_tokens;
    out["entity_count"] = stats.entity_count;
    out["per_tag"] = per_tag;
    out["coarse"] = coarse;
    return out;
}

}  // namespace

PYBIND11_MODULE(_nerforge, m) {
    m.doc() = "Silver-standard hierarchical NER corpus generation from Wikipedia/DBpedia";

    m.def("normalize_title", &nerforge::normalize_title, py::arg("title"),
          "Canonical MediaWiki title form (underscores, uppercased first letter).");

    m.def(
        "strip_and_link",
        [](const std::string& wikitext, const std::string& title, uint64_t page_id) {
            nerforge::RawArticle art;
            art.page_id = page_id;
            art.title = title;
            art.wikitext = wikitext;
            return document_to_dict(nerforge::strip_and_link(art));
        },
        py::arg("wikitext"), py::arg("title") = "", py::arg("page_id") = 1,
        "Strip markup, returning plain text plus hyperlink spans.");

    m.def(
        "extract_documents",
        [](const std::filesystem::path& dump_path, const std::string& language) {
            std::ifstream in(dump_path, std::ios::binary);
            if (!in) throw std::runtime_error("cannot open dump file: " + dump_path.string());
            nerforge::DumpReader reader(in, language);
            std::vector<nerforge::RawArticle> articles;
            while (auto art = reader.next()) {
                if (art->is_redirect || art->wikitext.empty()) continue;
                articles.push_back(std::move(*art));
            }
            py::list out;
            for (const auto& art : articles) {
                out.append(document_to_dict(
                    nerforge::strip_and_link(art, nullptr, &reader.declared_namespaces())));
            }
            return out;
        },
        py::arg("dump_path"), py::arg("language") = "en",
        "Read a MediaWiki XML dump (plain or bz2) and return stripped "
        "documents with link spans; redirects and empty pages are skipped.");

    m.def("split_sentences",
          [](const std::string& text) { return nerforge::split_sentences(text); },
          py::arg("text"));
    m.def("tokenize", [](const std::string& text) { return nerforge::tokenize(text); },
          py::arg("sentence"));

    py::class_<nerforge::PriorityTable>(m, "PriorityTable")
        .def_static("load", &nerforge::load_priority_table, py::arg("path"))
        .def("priority_of", &nerforge::PriorityTable::priority_of, py::arg("class_iri"));

    py::class_<nerforge::UnerMapping>(m, "UnerMapping")
        .def_static("load", &nerforge::load_uner_mapping, py::arg("path"));

    m.def(
        "resolve_class",
        [](const std::vector<std::string>& classes, const nerforge::PriorityTable& priorities) {
            return nerforge::resolve_class(classes, priorities);
        },
        py::arg("classes"), py::arg("priorities"),
        "Highest-priority class with first-in-list tie-break, or None.");

    m.def(
        "map_to_uner",
        [](const std::string& class_iri, const nerforge::UnerMapping& mapping)
            -> std::optional<std::string> {
            const auto tag = nerforge::map_to_uner(class_iri, mapping);
            if (!tag) return std::nullopt;
            return tag->rendered();
        },
        py::arg("class_iri"), py::arg("mapping"));

    m.def(
        "tag_entity",
        [](const std::vector<std::string>& classes, const nerforge::PriorityTable& priorities,
           const nerforge::UnerMapping& mapping) -> std::optional<std::string> {
            const auto tag = nerforge::tag_entity(classes, priorities, mapping);
            if (!tag) return std::nullopt;
            return tag->rendered();
        },
        py::arg("classes"), py::arg("priorities"), py::arg("mapping"),
        "Resolve the class set and translate it to a rendered UNER tag, or None.");

    m.def(
        "annotate_text",
        [](const std::string& text, const std::vector<std::tuple<size_t, size_t, std::string>>& spans,
           const std::map<std::string, std::string>& entity_tags) {
            nerforge::LinkedDocument doc;
            doc.page_id = 1;
            doc.text = text;
            for (const auto& [start, end, target] : spans) {
                doc.links.push_back({start, end, target, ""});
            }
            // Spans arrive with python string (code point) offsets.
            doc.links = nerforge::spans_to_byte_offsets(doc.text, doc.links);
            for (auto& link : doc.links) {
                link.anchor = doc.text.substr(link.start, link.end - link.start);
            }
            std::vector<std::vector<std::pair<std::string, std::string>>> out;
            for (const auto& sentence : nerforge::annotate_document(doc, entity_tags)) {
                std::vector<std::pair<std::string, std::string>> toks;
                for (const auto& tok : sentence.tokens) toks.emplace_back(tok.surface, tok.label);
                out.push_back(std::move(toks));
            }
            return out;
        },
        py::arg("text"), py::arg("spans"), py::arg("entity_tags"),
        "Sentence-split, tokenize and IOB2-tag text given (start, end, target) "
        "spans and a target->tag map; only sentences with entities survive.");

    m.def(
        "compute_stats",
        [](const std::filesystem::path& corpus_root) {
            return stats_to_dict(nerforge::compute_stats(corpus_root));
        },
        py::arg("corpus_dir"));

    m.def(
        "build_gazetteer",
        [](const std::filesystem::path& corpus_root, const std::filesystem::path& out_tsv) {
            const auto gazetteer = nerforge::build_gazetteer(corpus_root);
            nerforge::write_gazetteer(out_tsv, gazetteer);
            return gazetteer.size();
        },
        py::arg("corpus_dir"), py::arg("out_tsv"));

    m.def(
        "augment_corpus",
        [](const std::filesystem::path& corpus_root, const std::filesystem::path& out_root,
           const std::filesystem::path& gazetteer_tsv) {
            const auto gazetteer = nerforge::read_gazetteer(gazetteer_tsv);
            const auto delta = nerforge::augment_corpus(corpus_root, out_root, gazetteer);
            py::dict out;
            out["non_entity_tokens"] = delta.non_entity_tokens;
            out["entity_tokens"] = delta.entity_tokens;
            out["entity_count"] = delta.entity_count;
            return out;
        },
        py::arg("corpus_dir"), py::arg("out_dir"), py::arg("gazetteer_tsv"));

    m.def(
        "sample_gazetteer",
        [](const std::filesystem::path& gazetteer_tsv, size_t n, uint64_t seed) {
            const auto gazetteer = nerforge::read_gazetteer(gazetteer_tsv);
            std::vector<std::pair<std::vector<std::string>, std::string>> out;
            for (const auto& entry : nerforge::sample_for_review(gazetteer, n, seed)) {
                out.emplace_back(entry.surfaces, entry.tag);
            }
            return out;
        },
        py::arg("gazetteer_tsv"), py::arg("n"), py::arg("seed"));

    py::class_<nerforge::PipelineConfig>(m, "PipelineConfig")
        .def(py::init<>())
        .def_readwrite("language", &nerforge::PipelineConfig::language)
        .def_readwrite("dump_path", &nerforge::PipelineConfig::dump_path)
        .def_readwrite("endpoint", &nerforge::PipelineConfig::endpoint)
        .def_readwrite("cache_path", &nerforge::PipelineConfig::cache_path)
        .def_readwrite("priorities_path", &nerforge::PipelineConfig::priorities_path)
        .def_readwrite("uner_map_path", &nerforge::PipelineConfig::uner_map_path)
        .def_readwrite("out_dir", &nerforge::PipelineConfig::out_dir)
        .def_readwrite("articles_per_file", &nerforge::PipelineConfig::articles_per_file)
        .def_readwrite("files_per_folder", &nerforge::PipelineConfig::files_per_folder)
        .def_readwrite("seed", &nerforge::PipelineConfig::seed)
        .def_readwrite("workers", &nerforge::PipelineConfig::workers)
        .def_readwrite("augment", &nerforge::PipelineConfig::augment)
        .def_readwrite("stop_after", &nerforge::PipelineConfig::stop_after);

    m.def(
        "run_pipeline",
        [](const nerforge::PipelineConfig& config, bool force) {
            const auto report = nerforge::run_pipeline(config, force);
            py::list stages;
            for (const auto& stage : report.stages) {
                py::dict d;
                d["name"] = stage.name;
                d["outcome"] = stage.outcome;
                d["duration_ms"] = stage.duration_ms;
                py::dict counters;
                for (const auto& [k, v] : stage.counters) counters[py::str(k)] = v;
                d["counters"] = counters;
                stages.append(d);
            }
            py::dict out;
            out["stages"] = stages;
            out["mapping_gaps"] = report.mapping_gaps;
            return out;
        },
        py::arg("config"), py::arg("force") = false);
}
