#include "nerforge/stats.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "nerforge/text_util.hpp"

namespace nerforge {

using nlohmann::json;

void accumulate(CorpusStats& stats, const TaggedSentence& sentence) {
    if (!iob2_valid(sentence)) {
        throw std::runtime_error("compute_stats: invalid IOB2 sentence");
    }
    for (const Token& tok : sentence.tokens) {
        ++stats.total_tokens;
        if (tok.label == "O") {
            ++stats.non_entity_tokens;
        } else {
            ++stats.entity_tokens;
            if (is_begin(tok.label)) {
                ++stats.entity_count;
                ++stats.per_tag[std::string(tag_of(tok.label))];
            }
        }
    }
    // Callers refresh `coarse` via coarse_rollup once accumulation is done.
}

CorpusStats compute_stats(const std::vector<TaggedSentence>& corpus) {
    CorpusStats stats;
    for (const TaggedSentence& sentence : corpus) accumulate(stats, sentence);
    stats.coarse = coarse_rollup(stats.per_tag);
    return stats;
}

CorpusStats compute_stats(const std::filesystem::path& corpus_root) {
    CorpusStats stats;
    for_each_sentence(corpus_root, [&](const TaggedSentence& s) { accumulate(stats, s); });
    stats.coarse = coarse_rollup(stats.per_tag);
    return stats;
}

CorpusStats merge(const CorpusStats& a, const CorpusStats& b) {
    CorpusStats out = a;
    out.total_tokens += b.total_tokens;
    out.non_entity_tokens += b.non_entity_tokens;
    out.entity_tokens += b.entity_tokens;
    out.entity_count += b.entity_count;
    for (const auto& [tag, count] : b.per_tag) out.per_tag[tag] += count;
    out.coarse = coarse_rollup(out.per_tag);
    return out;
}

namespace {

bool has_tag_prefix(std::string_view tag, std::string_view prefix) {
    if (tag == prefix) return true;
    return tag.size() > prefix.size() && starts_with(tag, prefix) && tag[prefix.size()] == '-';
}

}  // namespace

CoarseCounts coarse_rollup(const std::map<std::string, uint64_t>& per_tag) {
    CoarseCounts out;
    for (const auto& [tag, count] : per_tag) {
        if (tag == "Name-Person-Name") {
            out.person += count;
        } else if (has_tag_prefix(tag, "Name-Location")) {
            out.location += count;
        } else if (has_tag_prefix(tag, "Name-Organization")) {
            out.organization += count;
        } else {
            out.other += count;
        }
    }
    return out;
}

std::string stats_to_json(const CorpusStats& stats) {
    json per_tag = json::object();
    for (const auto& [tag, count] : stats.per_tag) per_tag[tag] = count;
    const json j = {{"total_tokens", stats.total_tokens},
                    {"non_entity_tokens", stats.non_entity_tokens},
                    {"entity_tokens", stats.entity_tokens},
                    {"entity_count", stats.entity_count},
                    {"per_tag", per_tag},
                    {"coarse",
                     {{"Person", stats.coarse.person},
                      {"Location", stats.coarse.location},
                      {"Organization", stats.coarse.organization},
                      {"Other", stats.coarse.other}}}};
    return j.dump(2) + "\n";
}

CorpusStats stats_from_json(const std::string& json_text) {
    const json j = json::parse(json_text);
    CorpusStats stats;
    stats.total_tokens = j.at("total_tokens").get<uint64_t>();
    stats.non_entity_tokens = j.at("non_entity_tokens").get<uint64_t>();
    stats.entity_tokens = j.at("entity_tokens").get<uint64_t>();
    stats.entity_count = j.at("entity_count").get<uint64_t>();
    for (const auto& [tag, count] : j.at("per_tag").items()) {
        stats.per_tag[tag] = count.get<uint64_t>();
    }
    const json& coarse = j.at("coarse");
    stats.coarse.person = coarse.at("Person").get<uint64_t>();
    stats.coarse.location = coarse.at("Location").get<uint64_t>();
    stats.coarse.organization = coarse.at("Organization").get<uint64_t>();
    stats.coarse.other = coarse.at("Other").get<uint64_t>();
    return stats;
}

void write_stats_file(const std::filesystem::path& path, const CorpusStats& stats) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write stats file: " + path.string());
    out << stats_to_json(stats);
}

CorpusStats read_stats_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read stats file: " + path.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return stats_from_json(content);
}

}  // namespace nerforge
