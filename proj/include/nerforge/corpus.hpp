// IOB2 corpus types and CoNLL-style file I/O: one `surface<TAB>label` per
// line, blank line between sentences, batches of articles per file, files
// grouped into folders.
#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace nerforge {

struct Token {
    std::string surface;  // non-empty, no whitespace
    std::string label;    // "O", "B-<tag>" or "I-<tag>"

    bool operator==(const Token&) const = default;
};

struct TaggedSentence {
    std::vector<Token> tokens;

    bool operator==(const TaggedSentence&) const = default;
};

inline bool is_begin(std::string_view label) { return label.size() > 2 && label[0] == 'B' && label[1] == '-'; }
inline bool is_inside(std::string_view label) { return label.size() > 2 && label[0] == 'I' && label[1] == '-'; }
inline std::string_view tag_of(std::string_view label) {
    return is_begin(label) || is_inside(label) ? label.substr(2) : std::string_view{};
}

// IOB2 validity: every I-t immediately preceded by B-t or I-t with the same t.
bool iob2_valid(const TaggedSentence& sentence);

std::string to_conll(const std::vector<TaggedSentence>& sentences);
std::vector<TaggedSentence> parse_conll(std::string_view content);

// Corpus tree layout: <root>/<folder %03u>/<file %05u>.conll. Files hold
// `articles_per_file` articles each; folders hold `files_per_folder` files.
class CorpusWriter {
  public:
    CorpusWriter(std::filesystem::path root, size_t articles_per_file, size_t files_per_folder);

    // Sentences of one article, already filtered and ordered.
    void add_article(const std::vector<TaggedSentence>& sentences);
    void finish();

    size_t files_written() const { return files_written_; }
    size_t folders_written() const { return folders_written_; }

  private:
    void flush_file();

    std::filesystem::path root_;
    size_t articles_per_file_;
    size_t files_per_folder_;
    std::string pending_;
    size_t pending_articles_ = 0;
    size_t files_written_ = 0;
    size_t folders_written_ = 0;
    bool finished_ = false;
};

// Corpus files under `root` in deterministic (lexicographic) order.
std::vector<std::filesystem::path> corpus_files(const std::filesystem::path& root);

// Streams every sentence of a corpus tree. Throws on IOB2 violations.
void for_each_sentence(const std::filesystem::path& root,
                       const std::function<void(const TaggedSentence&)>& fn);

std::vector<TaggedSentence> read_corpus(const std::filesystem::path& root);

}  // namespace nerforge
