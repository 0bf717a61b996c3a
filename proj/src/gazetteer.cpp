#include "nerforge/gazetteer.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "nerforge/text_util.hpp"

namespace nerforge {

bool gazetteer_filters_out(const std::vector<std::string>& surfaces) {
    size_t cp_count = 0;
    size_t lower_count = 0;
    bool all_digits = true;
    for (const std::string& surface : surfaces) {
        for (size_t i = 0; i < surface.size();) {
            const char32_t cp = utf8_next(surface, i);
            ++cp_count;
            if (is_lower_letter(cp)) ++lower_count;
            if (!is_ascii_digit(cp)) all_digits = false;
        }
    }
    if (cp_count == 0 || cp_count == 1) return true;           // single character
    if (cp_count == 2 && lower_count == 2) return true;        // two lower-case characters
    if (all_digits) return true;                               // digits only
    return false;
}

Gazetteer Gazetteer::from_entries(std::vector<GazetteerEntry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const GazetteerEntry& a, const GazetteerEntry& b) {
                  return a.surfaces != b.surfaces ? a.surfaces < b.surfaces : a.tag < b.tag;
              });
    entries.erase(std::unique(entries.begin(), entries.end(),
                              [](const GazetteerEntry& a, const GazetteerEntry& b) {
                                  return a.surfaces == b.surfaces;
                              }),
                  entries.end());
    Gazetteer g;
    g.entries_ = std::move(entries);
    return g;
}

namespace {

struct TagChoice {
    uint64_t count = 0;
    uint64_t first_seen = 0;
};

struct SequenceInfo {
    // tag -> occurrence count and first-encounter rank
    std::map<std::string, TagChoice> tags;
};

std::string join_surfaces(const std::vector<std::string>& surfaces) {
    std::string key;
    for (const std::string& s : surfaces) {
        if (!key.empty()) key.push_back(' ');
        key += s;
    }
    return key;
}

class GazetteerBuilder {
  public:
    void add(const TaggedSentence& sentence) {
        const auto& toks = sentence.tokens;
        for (size_t i = 0; i < toks.size();) {
            if (!is_begin(toks[i].label)) {
                ++i;
                continue;
            }
            const std::string tag(tag_of(toks[i].label));
            std::vector<std::string> surfaces = {toks[i].surface};
            size_t j = i + 1;
            while (j < toks.size() && is_inside(toks[j].label) && tag_of(toks[j].label) == tag) {
                surfaces.push_back(toks[j].surface);
                ++j;
            }
            record(std::move(surfaces), tag);
            i = j;
        }
    }

    Gazetteer build() && {
        std::vector<GazetteerEntry> entries;
        entries.reserve(sequences_.size());
        for (auto& [key, info] : sequences_) {
            const TagChoice* best = nullptr;
            const std::string* best_tag = nullptr;
            for (const auto& [tag, choice] : info.tags) {
                if (!best || choice.count > best->count ||
                    (choice.count == best->count && choice.first_seen < best->first_seen)) {
                    best = &choice;
                    best_tag = &tag;
                }
            }
            entries.push_back({split(key, ' '), *best_tag});
        }
        return Gazetteer::from_entries(std::move(entries));
    }

  private:
    void record(std::vector<std::string> surfaces, const std::string& tag) {
        if (gazetteer_filters_out(surfaces)) return;
        auto& choice = sequences_[join_surfaces(surfaces)].tags[tag];
        ++choice.count;
        if (choice.count == 1) choice.first_seen = order_++;
    }

    std::map<std::string, SequenceInfo> sequences_;
    uint64_t order_ = 0;
};

}  // namespace

Gazetteer build_gazetteer(const std::vector<TaggedSentence>& corpus) {
    GazetteerBuilder builder;
    for (const TaggedSentence& sentence : corpus) builder.add(sentence);
    return std::move(builder).build();
}

Gazetteer build_gazetteer(const std::filesystem::path& corpus_root) {
    GazetteerBuilder builder;
    for_each_sentence(corpus_root, [&](const TaggedSentence& s) { builder.add(s); });
    return std::move(builder).build();
}

void write_gazetteer(const std::filesystem::path& path, const Gazetteer& gazetteer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write gazetteer: " + path.string());
    for (const GazetteerEntry& entry : gazetteer.entries()) {
        out << join_surfaces(entry.surfaces) << '\t' << entry.tag << '\n';
    }
}

Gazetteer read_gazetteer(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read gazetteer: " + path.string());
    std::vector<GazetteerEntry> entries;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const size_t tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected <surfaces><TAB><tag>");
        }
        entries.push_back({split(line.substr(0, tab), ' '), line.substr(tab + 1)});
    }
    return Gazetteer::from_entries(std::move(entries));
}

// --- Matching automaton (Aho-Corasick over interned tokens) -----------------

struct TokenMatcher::Impl {
    struct Node {
        std::unordered_map<int, int> next;
        int fail = 0;
        int entry = -1;   // gazetteer entry ending here
        int match_out = 0; // nearest suffix node (incl. self) with an entry, 0 = none
        size_t depth = 0;
    };

    std::unordered_map<std::string, int> token_ids;
    std::vector<Node> nodes;
    const Gazetteer* gazetteer = nullptr;

    int id_of(const std::string& token) const {
        const auto it = token_ids.find(token);
        return it == token_ids.end() ? -1 : it->second;
    }

    void build(const Gazetteer& g) {
        gazetteer = &g;
        nodes.assign(1, Node{});
        for (size_t e = 0; e < g.entries().size(); ++e) {
            int node = 0;
            for (const std::string& token : g.entries()[e].surfaces) {
                const int id =
                    token_ids.emplace(token, static_cast<int>(token_ids.size())).first->second;
                const auto it = nodes[node].next.find(id);
                if (it == nodes[node].next.end()) {
                    nodes[node].next.emplace(id, static_cast<int>(nodes.size()));
                    const size_t depth = nodes[node].depth + 1;
                    node = static_cast<int>(nodes.size());
                    nodes.push_back(Node{});
                    nodes.back().depth = depth;
                } else {
                    node = it->second;
                }
            }
            nodes[node].entry = static_cast<int>(e);
        }
        // BFS failure links.
        std::deque<int> queue;
        for (const auto& [id, child] : nodes[0].next) {
            nodes[child].fail = 0;
            queue.push_back(child);
        }
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            nodes[u].match_out =
                nodes[u].entry >= 0 ? u : nodes[nodes[u].fail].match_out;
            for (const auto& [id, v] : nodes[u].next) {
                int f = nodes[u].fail;
                while (f != 0 && !nodes[f].next.count(id)) f = nodes[f].fail;
                const auto it = nodes[f].next.find(id);
                nodes[v].fail = (it != nodes[f].next.end() && it->second != v) ? it->second : 0;
                queue.push_back(v);
            }
        }
        nodes[0].match_out = 0;
    }
};

TokenMatcher::TokenMatcher(const Gazetteer& gazetteer) : impl_(std::make_unique<Impl>()) {
    impl_->build(gazetteer);
}

TokenMatcher::~TokenMatcher() = default;
TokenMatcher::TokenMatcher(TokenMatcher&&) noexcept = default;
TokenMatcher& TokenMatcher::operator=(TokenMatcher&&) noexcept = default;

std::vector<TokenMatcher::Match> TokenMatcher::find(
    const std::vector<std::string>& tokens) const {
    const Impl& m = *impl_;
    // Longest match per start position.
    std::vector<size_t> best_end(tokens.size(), 0);
    std::vector<const GazetteerEntry*> best_entry(tokens.size(), nullptr);

    int node = 0;
    for (size_t j = 0; j < tokens.size(); ++j) {
        const int id = m.id_of(tokens[j]);
        if (id < 0) {
            node = 0;
            continue;
        }
        while (node != 0 && !m.nodes[node].next.count(id)) node = m.nodes[node].fail;
        const auto it = m.nodes[node].next.find(id);
        node = it == m.nodes[node].next.end() ? 0 : it->second;
        for (int out = m.nodes[node].match_out; out != 0;
             out = m.nodes[m.nodes[out].fail].match_out) {
            const size_t start = j + 1 - m.nodes[out].depth;
            if (j + 1 > best_end[start]) {
                best_end[start] = j + 1;
                best_entry[start] = &m.gazetteer->entries()[m.nodes[out].entry];
            }
        }
    }

    // Leftmost-longest selection: earliest start wins, then longest.
    std::vector<Match> matches;
    size_t cursor = 0;
    for (size_t start = 0; start < tokens.size(); ++start) {
        if (start < cursor || best_entry[start] == nullptr) continue;
        matches.push_back({start, best_end[start], best_entry[start]});
        cursor = best_end[start];
    }
    return matches;
}

// --- Annotation increment ----------------------------------------------------

AugmentDelta& AugmentDelta::operator+=(const AugmentDelta& o) {
    non_entity_tokens += o.non_entity_tokens;
    entity_tokens += o.entity_tokens;
    entity_count += o.entity_count;
    for (const auto& [tag, count] : o.per_tag) per_tag[tag] += count;
    return *this;
}

size_t augment_sentence(TaggedSentence& sentence, const TokenMatcher& matcher,
                        AugmentDelta* delta) {
    size_t applied = 0;
    const auto& toks = sentence.tokens;
    size_t i = 0;
    while (i < toks.size()) {
        if (toks[i].label != "O") {
            ++i;
            continue;
        }
        size_t run_end = i;
        while (run_end < toks.size() && toks[run_end].label == "O") ++run_end;

        std::vector<std::string> window;
        window.reserve(run_end - i);
        for (size_t k = i; k < run_end; ++k) window.push_back(toks[k].surface);
        for (const TokenMatcher::Match& match : matcher.find(window)) {
            const std::string& tag = match.entry->tag;
            for (size_t k = match.begin; k < match.end; ++k) {
                sentence.tokens[i + k].label = (k == match.begin ? "B-" : "I-") + tag;
            }
            ++applied;
            if (delta) {
                const auto len = static_cast<int64_t>(match.end - match.begin);
                delta->non_entity_tokens -= len;
                delta->entity_tokens += len;
                delta->entity_count += 1;
                delta->per_tag[tag] += 1;
            }
        }
        i = run_end;
    }
    return applied;
}

AugmentDelta augment(std::vector<TaggedSentence>& corpus, const Gazetteer& gazetteer) {
    const TokenMatcher matcher(gazetteer);
    AugmentDelta delta;
    for (TaggedSentence& sentence : corpus) augment_sentence(sentence, matcher, &delta);
    return delta;
}

AugmentDelta augment_corpus(const std::filesystem::path& in_root,
                            const std::filesystem::path& out_root, const Gazetteer& gazetteer) {
    const TokenMatcher matcher(gazetteer);
    AugmentDelta delta;
    std::filesystem::create_directories(out_root);
    for (const std::filesystem::path& file : corpus_files(in_root)) {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw std::runtime_error("cannot read corpus file: " + file.string());
        std::string content((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
        std::vector<TaggedSentence> sentences = parse_conll(content);
        for (TaggedSentence& sentence : sentences) {
            if (!iob2_valid(sentence)) {
                throw std::runtime_error("invalid IOB2 sequence in " + file.string());
            }
            augment_sentence(sentence, matcher, &delta);
        }
        const std::filesystem::path rel = std::filesystem::relative(file, in_root);
        const std::filesystem::path out_path = out_root / rel;
        std::filesystem::create_directories(out_path.parent_path());
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write corpus file: " + out_path.string());
        out << to_conll(sentences);
    }
    return delta;
}

std::string delta_report_json(const CorpusStats& before, const CorpusStats& after) {
    using nlohmann::json;
    auto triple = [](uint64_t b, uint64_t a) {
        return json{{"before", b},
                    {"after", a},
                    {"delta", static_cast<int64_t>(a) - static_cast<int64_t>(b)}};
    };
    const json j = {
        {"total_tokens", triple(before.total_tokens, after.total_tokens)},
        {"non_entity_tokens", triple(before.non_entity_tokens, after.non_entity_tokens)},
        {"entity_tokens", triple(before.entity_tokens, after.entity_tokens)},
        {"entity_count", triple(before.entity_count, after.entity_count)},
        {"coarse",
         {{"Person", triple(before.coarse.person, after.coarse.person)},
          {"Location", triple(before.coarse.location, after.coarse.location)},
          {"Organization", triple(before.coarse.organization, after.coarse.organization)},
          {"Other", triple(before.coarse.other, after.coarse.other)}}}};
    return j.dump(2) + "\n";
}

}  // namespace nerforge
