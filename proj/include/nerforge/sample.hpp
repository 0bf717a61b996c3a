// Seeded uniform sampling of gazetteer entries for manual review.
#pragma once

#include <cstdint>
#include <vector>

#include "nerforge/gazetteer.hpp"

namespace nerforge {

// Uniform sample of n entries without replacement, reproducible from the
// seed on any platform. Throws std::invalid_argument when n > size.
std::vector<GazetteerEntry> sample_for_review(const Gazetteer& gazetteer, size_t n,
                                              uint64_t seed);

}  // namespace nerforge
