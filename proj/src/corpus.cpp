#include "nerforge/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace nerforge {

bool iob2_valid(const TaggedSentence& sentence) {
    if (sentence.tokens.empty()) return false;
    std::string_view prev_tag;
    for (const Token& tok : sentence.tokens) {
        if (tok.surface.empty()) return false;
        if (tok.label == "O") {
            prev_tag = {};
        } else if (is_begin(tok.label)) {
            prev_tag = tag_of(tok.label);
        } else if (is_inside(tok.label)) {
            if (prev_tag.empty() || prev_tag != tag_of(tok.label)) return false;
            prev_tag = tag_of(tok.label);
        } else {
            return false;
        }
    }
    return true;
}

std::string to_conll(const std::vector<TaggedSentence>& sentences) {
    std::string out;
    bool first = true;
    for (const TaggedSentence& sentence : sentences) {
        if (!first) out.push_back('\n');
        first = false;
        for (const Token& tok : sentence.tokens) {
            out += tok.surface;
            out.push_back('\t');
            out += tok.label;
            out.push_back('\n');
        }
    }
    return out;
}

std::vector<TaggedSentence> parse_conll(std::string_view content) {
    std::vector<TaggedSentence> sentences;
    TaggedSentence current;
    size_t pos = 0;
    size_t lineno = 0;
    while (pos <= content.size()) {
        const size_t eol = content.find('\n', pos);
        const std::string_view line =
            content.substr(pos, (eol == std::string_view::npos ? content.size() : eol) - pos);
        ++lineno;
        if (line.empty()) {
            if (!current.tokens.empty()) {
                sentences.push_back(std::move(current));
                current = {};
            }
        } else {
            const size_t tab = line.find('\t');
            if (tab == std::string_view::npos || tab == 0 || tab + 1 >= line.size()) {
                throw std::runtime_error("corpus line " + std::to_string(lineno) +
                                         ": expected <surface><TAB><label>");
            }
            current.tokens.push_back(
                {std::string(line.substr(0, tab)), std::string(line.substr(tab + 1))});
        }
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }
    if (!current.tokens.empty()) sentences.push_back(std::move(current));
    return sentences;
}

CorpusWriter::CorpusWriter(std::filesystem::path root, size_t articles_per_file,
                           size_t files_per_folder)
    : root_(std::move(root)),
      articles_per_file_(std::max<size_t>(1, articles_per_file)),
      files_per_folder_(std::max<size_t>(1, files_per_folder)) {
    std::filesystem::create_directories(root_);
}

void CorpusWriter::add_article(const std::vector<TaggedSentence>& sentences) {
    if (sentences.empty()) return;  // nothing survived filtering
    if (!pending_.empty()) pending_.push_back('\n');
    pending_ += to_conll(sentences);
    if (++pending_articles_ >= articles_per_file_) flush_file();
}

void CorpusWriter::flush_file() {
    if (pending_.empty()) {
        pending_articles_ = 0;
        return;
    }
    const size_t folder = files_written_ / files_per_folder_;
    char folder_name[8];
    char file_name[16];
    std::snprintf(folder_name, sizeof folder_name, "%03zu", folder);
    std::snprintf(file_name, sizeof file_name, "%05zu.conll", files_written_);
    const std::filesystem::path dir = root_ / folder_name;
    std::filesystem::create_directories(dir);
    folders_written_ = folder + 1;

    std::ofstream out(dir / file_name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write corpus file in " + dir.string());
    out << pending_;
    pending_.clear();
    pending_articles_ = 0;
    ++files_written_;
}

void CorpusWriter::finish() {
    if (finished_) return;
    flush_file();
    finished_ = true;
}

std::vector<std::filesystem::path> corpus_files(const std::filesystem::path& root) {
    std::vector<std::filesystem::path> files;
    if (!std::filesystem::exists(root)) return files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
        if (entry.is_regular_file() && entry.path().extension() == ".conll") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

void for_each_sentence(const std::filesystem::path& root,
                       const std::function<void(const TaggedSentence&)>& fn) {
    for (const std::filesystem::path& file : corpus_files(root)) {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw std::runtime_error("cannot read corpus file: " + file.string());
        std::string content((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
        for (const TaggedSentence& sentence : parse_conll(content)) {
            if (!iob2_valid(sentence)) {
                throw std::runtime_error("invalid IOB2 sequence in " + file.string());
            }
            fn(sentence);
        }
    }
}

std::vector<TaggedSentence> read_corpus(const std::filesystem::path& root) {
    std::vector<TaggedSentence> sentences;
    for_each_sentence(root, [&](const TaggedSentence& s) { sentences.push_back(s); });
    return sentences;
}

}  // namespace nerforge
