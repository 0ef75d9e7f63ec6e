#pragma once

#include <cstdint>

#include "treedec/instances.hpp"

namespace treedec {

// Synthetic post/response pairs from a small template grammar. Responses
// come with hand-specified dependency parses, so the whole pipeline runs
// without an external parser. Posts are pairwise distinct; the seed picks
// which template instantiations are used. At most 180 distinct pairs exist.
std::vector<RawPair> make_toy_corpus(int pairs, std::uint64_t seed);

}  // namespace treedec
