#pragma once

#include <cstdint>
#include <random>

#include "treedec/tree.hpp"

namespace treedec {

using Rng = std::mt19937_64;

// Bounded draw that does not depend on the standard library's distribution
// implementation, so seeded runs reproduce across toolchains.
inline std::uint64_t uniform_u64(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % bound;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return draw % bound;
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(uniform_u64(rng, static_cast<std::uint64_t>(hi - lo) + 1));
}

inline double uniform_real(Rng& rng, double lo, double hi) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + unit * (hi - lo);
}

// Random SP tree with n nodes: shapes drawn by sequential child-count
// sampling (counts uniform in 0..min(max_children, remaining)), tags uniform
// in 0..child count. Tokens are preorder indices offset past the reserved
// ids, so flattenings are permutations of distinct words.
SpNode random_sp_tree(int n, Rng& rng, int max_children = 4);

// Random projective dependency parse of n tokens, shaped like random_sp_tree.
// Token i is spelled "w<i>".
DependencyTree random_projective_dep(int n, Rng& rng, int max_children = 4);

}  // namespace treedec
