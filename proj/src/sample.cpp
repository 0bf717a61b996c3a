#include "nerforge/sample.hpp"

#include <numeric>
#include <random>
#include <stdexcept>

namespace nerforge {

namespace {

// Rejection sampling keeps the draw sequence identical across standard
// library implementations (std::uniform_int_distribution is not portable).
uint64_t uniform_below(std::mt19937_64& rng, uint64_t bound) {
    const uint64_t limit = std::numeric_limits<uint64_t>::max() -
                           std::numeric_limits<uint64_t>::max() % bound;
    uint64_t draw;
    do {
        draw = rng();
    } while (draw >= limit);
    return draw % bound;
}

}  // namespace

std::vector<GazetteerEntry> sample_for_review(const Gazetteer& gazetteer, size_t n,
                                              uint64_t seed) {
    const size_t size = gazetteer.size();
    if (n > size) {
        throw std::invalid_argument("sample size " + std::to_string(n) +
                                    " exceeds gazetteer size " + std::to_string(size));
    }
    std::vector<size_t> indices(size);
    std::iota(indices.begin(), indices.end(), size_t{0});

    std::mt19937_64 rng(seed);
    std::vector<GazetteerEntry> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) {  // partial Fisher-Yates
        const size_t j = i + uniform_below(rng, size - i);
        std::swap(indices[i], indices[j]);
        out.push_back(gazetteer.entries()[indices[i]]);
    }
    return out;
}

}  // namespace nerforge
