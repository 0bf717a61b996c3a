#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "nerforge/gazetteer.hpp"
#include "nerforge/sample.hpp"
#include "nerforge/stats.hpp"

using namespace nerforge;

namespace {

TaggedSentence sentence_of(std::initializer_list<std::pair<const char*, const char*>> toks) {
    TaggedSentence s;
    for (const auto& [surface, label] : toks) s.tokens.push_back({surface, label});
    return s;
}

// Uniformly random IOB2-valid corpus over a small vocabulary.
std::vector<TaggedSentence> random_corpus(std::mt19937& rng, size_t max_sentences = 12,
                                          size_t max_tokens = 20) {
    static const std::vector<std::string> vocab = {"Zagreb", "Croatia", "games", "the",
                                                   "Sava",   "river",   "X",     "1990"};
    static const std::vector<std::string> tags = {"Name-Person-Name", "Name-Location-GPE-City",
                                                  "Name-Event-Occasion-Game"};
    std::vector<TaggedSentence> corpus;
    const size_t sentences = 1 + rng() % max_sentences;
    for (size_t si = 0; si < sentences; ++si) {
        TaggedSentence s;
        const size_t n = 1 + rng() % max_tokens;
        size_t t = 0;
        while (t < n) {
            const std::string& word = vocab[rng() % vocab.size()];
            if (rng() % 3 == 0) {
                const std::string& tag = tags[rng() % tags.size()];
                const size_t len = std::min<size_t>(1 + rng() % 3, n - t);
                for (size_t k = 0; k < len; ++k) {
                    s.tokens.push_back(
                        {vocab[rng() % vocab.size()], (k == 0 ? "B-" : "I-") + tag});
                }
                t += len;
            } else {
                s.tokens.push_back({word, "O"});
                ++t;
            }
        }
        corpus.push_back(std::move(s));
    }
    return corpus;
}

// Straight recount without the incremental machinery.
CorpusStats brute_stats(const std::vector<TaggedSentence>& corpus) {
    CorpusStats out;
    for (const auto& s : corpus) {
        for (const auto& tok : s.tokens) {
            ++out.total_tokens;
            if (tok.label == "O") {
                ++out.non_entity_tokens;
            } else {
                ++out.entity_tokens;
            }
            if (is_begin(tok.label)) {
                ++out.entity_count;
                ++out.per_tag[std::string(tag_of(tok.label))];
            }
        }
    }
    out.coarse = coarse_rollup(out.per_tag);
    return out;
}

void check_identities(const CorpusStats& stats) {
    CHECK(stats.total_tokens == stats.non_entity_tokens + stats.entity_tokens);
    uint64_t per_tag_sum = 0;
    for (const auto& [tag, count] : stats.per_tag) per_tag_sum += count;
    CHECK(stats.entity_count == per_tag_sum);
    CHECK(stats.entity_tokens >= stats.entity_count);
    CHECK(stats.coarse.total() == stats.entity_count);
}

}  // namespace

// --- compute_stats ------------------------------------------------------------

TEST_CASE("the published Croatian corpus row satisfies the stats identity") {
    CHECK(8'436'254ULL + 951'970ULL == 9'388'224ULL);
}

TEST_CASE("empty corpus gives all-zero stats") {
    const CorpusStats stats = compute_stats(std::vector<TaggedSentence>{});
    CHECK(stats.total_tokens == 0);
    CHECK(stats.non_entity_tokens == 0);
    CHECK(stats.entity_tokens == 0);
    CHECK(stats.entity_count == 0);
    CHECK(stats.per_tag.empty());
    CHECK(stats.coarse.total() == 0);
}

TEST_CASE("fixture corpus stats equal an independent recount") {
    std::mt19937 rng(1);
    for (int iter = 0; iter < 100; ++iter) {
        const auto corpus = random_corpus(rng);
        const CorpusStats stats = compute_stats(corpus);
        CHECK(stats == brute_stats(corpus));
        check_identities(stats);
    }
}

TEST_CASE("invalid IOB2 input is a defect") {
    const std::vector<TaggedSentence> corpus = {sentence_of({{"a", "I-t"}})};
    CHECK_THROWS_AS(compute_stats(corpus), std::runtime_error);
}

TEST_CASE("stats merge is associative and commutative and matches the whole") {
    std::mt19937 rng(7);
    for (int iter = 0; iter < 60; ++iter) {
        const auto a = random_corpus(rng);
        const auto b = random_corpus(rng);
        const auto c = random_corpus(rng);

        auto whole = a;
        whole.insert(whole.end(), b.begin(), b.end());
        whole.insert(whole.end(), c.begin(), c.end());

        const CorpusStats sa = compute_stats(a);
        const CorpusStats sb = compute_stats(b);
        const CorpusStats sc = compute_stats(c);

        CHECK(merge(sa, sb) == merge(sb, sa));
        CHECK(merge(merge(sa, sb), sc) == merge(sa, merge(sb, sc)));
        CHECK(merge(merge(sa, sb), sc) == compute_stats(whole));
    }
}

TEST_CASE("stats json round trip") {
    std::mt19937 rng(11);
    const CorpusStats stats = compute_stats(random_corpus(rng));
    CHECK(stats_from_json(stats_to_json(stats)) == stats);
}

// --- coarse_rollup --------------------------------------------------------------

TEST_CASE("rollup rule application") {
    const std::map<std::string, uint64_t> per_tag = {{"Name-Person-Name", 5},
                                                     {"Name-Location-GPE-City", 3},
                                                     {"Name-Product-Award", 1}};
    const CoarseCounts coarse = coarse_rollup(per_tag);
    CHECK(coarse.person == 5);
    CHECK(coarse.location == 3);
    CHECK(coarse.organization == 0);
    CHECK(coarse.other == 1);
}

TEST_CASE("empty rollup is zero") {
    CHECK(coarse_rollup({}).total() == 0);
}

TEST_CASE("rollup matches brute-force prefix grouping and is exhaustive") {
    const std::vector<std::string> tag_pool = {
        "Name-Person-Name",          "Name-Person-Title",  // only -Name counts as Person
        "Name-Location-GPE-City",    "Name-Location",      "Name-LocationX",
        "Name-Organization-Corporation-Company", "Name-Organization",
        "Name-Product-Award",        "Name-Event-Occasion-Game"};
    std::mt19937 rng(13);
    for (int iter = 0; iter < 100; ++iter) {
        std::map<std::string, uint64_t> per_tag;
        for (const auto& tag : tag_pool) {
            if (rng() % 2) per_tag[tag] = rng() % 50;
        }
        const CoarseCounts coarse = coarse_rollup(per_tag);

        CoarseCounts expected;
        for (const auto& [tag, count] : per_tag) {
            if (tag == "Name-Person-Name") expected.person += count;
            else if (tag == "Name-Location" || tag.starts_with("Name-Location-"))
                expected.location += count;
            else if (tag == "Name-Organization" || tag.starts_with("Name-Organization-"))
                expected.organization += count;
            else expected.other += count;
        }
        CHECK(coarse == expected);

        uint64_t total = 0;
        for (const auto& [tag, count] : per_tag) total += count;
        CHECK(coarse.total() == total);
    }
}

// --- build_gazetteer --------------------------------------------------------------

TEST_CASE("one entry per distinct tagged sequence") {
    const std::vector<TaggedSentence> corpus = {
        sentence_of({{"The", "O"},
                     {"2015", "B-Name-Event-Occasion-Game"},
                     {"European", "I-Name-Event-Occasion-Game"},
                     {"Games", "I-Name-Event-Occasion-Game"},
                     {"opened", "O"}})};
    const Gazetteer g = build_gazetteer(corpus);
    REQUIRE(g.size() == 1);
    CHECK(g.entries()[0].surfaces == std::vector<std::string>{"2015", "European", "Games"});
    CHECK(g.entries()[0].tag == "Name-Event-Occasion-Game");
}

TEST_CASE("single-character entities are discarded") {
    const auto corpus = std::vector<TaggedSentence>{sentence_of({{"a", "B-t"}, {"x", "O"}})};
    CHECK(build_gazetteer(corpus).size() == 0);
}

TEST_CASE("two-lowercase and all-digit entities are discarded") {
    const auto corpus = std::vector<TaggedSentence>{
        sentence_of({{"do", "B-t"}, {"x", "O"}, {"1990", "B-u"}})};
    CHECK(build_gazetteer(corpus).size() == 0);
}

TEST_CASE("filter edge cases: case, length and unicode") {
    CHECK(gazetteer_filters_out({"a"}));
    CHECK(gazetteer_filters_out({"Š"}));     // one code point, two bytes
    CHECK(gazetteer_filters_out({"do"}));
    CHECK(gazetteer_filters_out({"šž"}));    // two lowercase, non-ASCII
    CHECK(gazetteer_filters_out({"1990"}));
    CHECK(gazetteer_filters_out({"19", "90"}));  // digits across tokens
    CHECK_FALSE(gazetteer_filters_out({"Do"}));  // capital letter
    CHECK_FALSE(gazetteer_filters_out({"dom"})); // three characters
    CHECK_FALSE(gazetteer_filters_out({"x2"}));  // digit plus letter
    CHECK_FALSE(gazetteer_filters_out({"Zagreb"}));
    CHECK_FALSE(gazetteer_filters_out({"New", "York"}));
}

TEST_CASE("ambiguous sequences collapse to the most frequent tag") {
    const std::vector<TaggedSentence> corpus = {
        sentence_of({{"Sava", "B-Name-Location-Geological_Region-River"}}),
        sentence_of({{"Sava", "B-Name-Person-Name"}}),
        sentence_of({{"Sava", "B-Name-Location-Geological_Region-River"}})};
    const Gazetteer g = build_gazetteer(corpus);
    REQUIRE(g.size() == 1);
    CHECK(g.entries()[0].tag == "Name-Location-Geological_Region-River");
}

TEST_CASE("frequency ties resolve to the first encountered tag") {
    const std::vector<TaggedSentence> corpus = {sentence_of({{"Sava", "B-second"}}),
                                                sentence_of({{"Sava", "B-first"}}),
                                                sentence_of({{"Sava", "B-second"}}),
                                                sentence_of({{"Sava", "B-first"}})};
    const Gazetteer g = build_gazetteer(corpus);
    REQUIRE(g.size() == 1);
    CHECK(g.entries()[0].tag == "second");
}

TEST_CASE("gazetteer tsv round trip") {
    const std::vector<TaggedSentence> corpus = {
        sentence_of({{"New", "B-t1"}, {"York", "I-t1"}, {"and", "O"}, {"Zagreb", "B-t2"}})};
    const Gazetteer g = build_gazetteer(corpus);
    const auto path = std::filesystem::temp_directory_path() / "nerforge_gaz_test.tsv";
    write_gazetteer(path, g);
    const Gazetteer loaded = read_gazetteer(path);
    CHECK(loaded.entries() == g.entries());
}

// --- augment -----------------------------------------------------------------------

namespace {

Gazetteer make_gazetteer(std::vector<GazetteerEntry> entries) {
    return Gazetteer::from_entries(std::move(entries));
}

// Reference implementation: walk positions left to right; at each O position
// try the longest entry whose tokens match O-labeled tokens entirely.
void brute_augment(TaggedSentence& sentence, const Gazetteer& gazetteer) {
    const size_t n = sentence.tokens.size();
    size_t i = 0;
    while (i < n) {
        if (sentence.tokens[i].label != "O") {
            ++i;
            continue;
        }
        const GazetteerEntry* best = nullptr;
        for (const auto& entry : gazetteer.entries()) {
            const size_t len = entry.surfaces.size();
            if (i + len > n) continue;
            bool match = true;
            for (size_t k = 0; k < len; ++k) {
                if (sentence.tokens[i + k].label != "O" ||
                    sentence.tokens[i + k].surface != entry.surfaces[k]) {
                    match = false;
                    break;
                }
            }
            if (match && (!best || len > best->surfaces.size())) best = &entry;
        }
        if (best) {
            for (size_t k = 0; k < best->surfaces.size(); ++k) {
                sentence.tokens[i + k].label = (k == 0 ? "B-" : "I-") + best->tag;
            }
            i += best->surfaces.size();
        } else {
            ++i;
        }
    }
}

}  // namespace

TEST_CASE("longest match wins at the same start") {
    const Gazetteer g = make_gazetteer({{{"X", "Y"}, "t1"}, {{"X", "Y", "Z"}, "t2"}});
    std::vector<TaggedSentence> corpus = {
        sentence_of({{"X", "O"}, {"Y", "O"}, {"Z", "O"}})};
    augment(corpus, g);
    CHECK(corpus[0].tokens[0].label == "B-t2");
    CHECK(corpus[0].tokens[1].label == "I-t2");
    CHECK(corpus[0].tokens[2].label == "I-t2");
}

TEST_CASE("fully tagged sentences are untouched") {
    const Gazetteer g = make_gazetteer({{{"Zagreb"}, "t"}});
    std::vector<TaggedSentence> corpus = {
        sentence_of({{"Zagreb", "B-u"}, {"rocks", "I-u"}})};
    const auto before = corpus;
    const AugmentDelta delta = augment(corpus, g);
    CHECK(corpus == before);
    CHECK(delta.entity_tokens == 0);
    CHECK(delta.entity_count == 0);
}

TEST_CASE("existing labels are never crossed or rewritten") {
    const Gazetteer g = make_gazetteer({{{"a", "b"}, "t"}});
    std::vector<TaggedSentence> corpus = {
        sentence_of({{"a", "O"}, {"b", "B-x"}, {"a", "O"}, {"b", "O"}})};
    augment(corpus, g);
    // First "a" cannot pair across the B-x token; the trailing "a b" can.
    CHECK(corpus[0].tokens[0].label == "O");
    CHECK(corpus[0].tokens[1].label == "B-x");
    CHECK(corpus[0].tokens[2].label == "B-t");
    CHECK(corpus[0].tokens[3].label == "I-t");
}

TEST_CASE("augment matches the brute-force oracle on short sentences") {
    std::mt19937 rng(4242);
    const std::vector<std::string> vocab = {"A", "B", "C", "D"};
    for (int iter = 0; iter < 2000; ++iter) {
        // Random gazetteer over the tiny vocabulary.
        std::vector<GazetteerEntry> entries;
        const size_t n_entries = 1 + rng() % 5;
        for (size_t e = 0; e < n_entries; ++e) {
            std::vector<std::string> surfaces;
            const size_t len = 1 + rng() % 3;
            for (size_t k = 0; k < len; ++k) surfaces.push_back(vocab[rng() % vocab.size()]);
            entries.push_back({surfaces, std::string("t") + char('0' + rng() % 3)});
        }
        const Gazetteer g = make_gazetteer(std::move(entries));

        TaggedSentence sentence;
        const size_t n = 1 + rng() % 20;
        for (size_t t = 0; t < n; ++t) {
            sentence.tokens.push_back(
                {vocab[rng() % vocab.size()], rng() % 4 == 0 ? "B-pre" : "O"});
        }

        TaggedSentence via_matcher = sentence;
        TaggedSentence via_brute = sentence;
        const TokenMatcher matcher(g);
        augment_sentence(via_matcher, matcher);
        brute_augment(via_brute, g);
        CHECK(via_matcher == via_brute);
        CHECK(iob2_valid(via_matcher));
    }
}

TEST_CASE("augment delta shape: token deltas mirror, occurrences bounded") {
    std::mt19937 rng(515);
    for (int iter = 0; iter < 100; ++iter) {
        auto corpus = random_corpus(rng);
        const Gazetteer g = build_gazetteer(corpus);
        const CorpusStats before = compute_stats(corpus);

        auto augmented = corpus;
        const AugmentDelta delta = augment(augmented, g);
        const CorpusStats after = compute_stats(augmented);

        // Sign/shape contract of the published delta table.
        CHECK(static_cast<int64_t>(after.non_entity_tokens) -
                  static_cast<int64_t>(before.non_entity_tokens) ==
              delta.non_entity_tokens);
        CHECK(delta.non_entity_tokens == -delta.entity_tokens);
        CHECK(delta.entity_count <= delta.entity_tokens);
        CHECK(after.total_tokens == before.total_tokens);
        CHECK(after.entity_tokens >= before.entity_tokens);
        CHECK(after.non_entity_tokens <= before.non_entity_tokens);

        // Surfaces unchanged, prior labels preserved.
        REQUIRE(augmented.size() == corpus.size());
        for (size_t s = 0; s < corpus.size(); ++s) {
            REQUIRE(augmented[s].tokens.size() == corpus[s].tokens.size());
            for (size_t t = 0; t < corpus[s].tokens.size(); ++t) {
                CHECK(augmented[s].tokens[t].surface == corpus[s].tokens[t].surface);
                if (corpus[s].tokens[t].label != "O") {
                    CHECK(augmented[s].tokens[t].label == corpus[s].tokens[t].label);
                }
            }
            CHECK(iob2_valid(augmented[s]));
        }

        // Idempotence: a second pass changes nothing.
        auto twice = augmented;
        const AugmentDelta second = augment(twice, g);
        CHECK(twice == augmented);
        CHECK(second.entity_tokens == 0);
        CHECK(second.entity_count == 0);
    }
}

// --- sample_for_review ----------------------------------------------------------

namespace {

Gazetteer synthetic_gazetteer(size_t n) {
    std::vector<GazetteerEntry> entries;
    for (size_t i = 0; i < n; ++i) {
        entries.push_back({{"Entry" + std::to_string(i)}, "Name-Person-Name"});
    }
    return Gazetteer::from_entries(std::move(entries));
}

}  // namespace

TEST_CASE("sampling the whole gazetteer permutes it") {
    const Gazetteer g = synthetic_gazetteer(50);
    const auto sample = sample_for_review(g, 50, 7);
    REQUIRE(sample.size() == 50);
    std::set<std::string> seen;
    for (const auto& entry : sample) seen.insert(entry.surfaces[0]);
    CHECK(seen.size() == 50);
}

TEST_CASE("a fixed seed reproduces the sample") {
    const Gazetteer g = synthetic_gazetteer(200);
    const auto a = sample_for_review(g, 25, 123);
    const auto b = sample_for_review(g, 25, 123);
    CHECK(a == b);
    const auto c = sample_for_review(g, 25, 124);
    CHECK(a != c);  // astronomically unlikely to collide
}

TEST_CASE("the published review sample size draws distinct entries") {
    const Gazetteer g = synthetic_gazetteer(1200);
    const auto sample = sample_for_review(g, 943, 2021);
    REQUIRE(sample.size() == 943);
    std::set<std::string> seen;
    for (const auto& entry : sample) seen.insert(entry.surfaces[0]);
    CHECK(seen.size() == 943);
}

TEST_CASE("oversampling is an error") {
    const Gazetteer g = synthetic_gazetteer(5);
    CHECK_THROWS_AS(sample_for_review(g, 6, 1), std::invalid_argument);
}
