#pragma once

#include <cstdint>

#include "treedec/tree.hpp"

namespace treedec {

// Exhaustive enumeration is feasible for small n only; callers beyond the
// cap are refused.
inline constexpr int kMaxEnumNodes = 10;

// Number of SP trees with n nodes (shapes and tags vary, labels fixed),
// counted by enumerating every ordered shape and every tag assignment.
std::uint64_t count_sp_trees(int n);

// Number of ordered trees with n nodes, by shape enumeration.
std::uint64_t count_ordered_trees(int n);

// Number of left-child right-sibling trees with n nodes: binary shapes whose
// root has no right child, enumerated over left/right subtree splits.
std::uint64_t count_lcrs_trees(int n);

}  // namespace treedec
