#pragma once

// Exhaustive enumeration of depth-capped padded trees over a tiny
// vocabulary; the brute-force oracle behind the probability-mass and
// search-equivalence tests.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "treedec/canonicalize.hpp"
#include "treedec/tree.hpp"

namespace treedec::testing {

inline std::uint64_t padded_tree_count(int vocab, int max_word_depth, int arity) {
  std::uint64_t per_level = 0;  // subtrees rooted at a word with given budget
  for (int budget = 1; budget <= max_word_depth; ++budget) {
    std::uint64_t options = 1 + per_level;  // eob or any smaller word subtree
    std::uint64_t combos = 1;
    for (int k = 0; k < arity; ++k) combos *= options;
    per_level = static_cast<std::uint64_t>(vocab - 1) * combos;
  }
  return 1 + per_level;  // the bare-eob tree plus word-rooted trees
}

namespace detail {

inline std::vector<TernaryPtr> word_subtrees(int vocab, int budget, int arity) {
  std::vector<TernaryPtr> options;  // per-slot choices: eob first
  options.push_back(std::make_unique<TernaryNode>(kEob));
  if (budget >= 2)
    for (auto& sub : word_subtrees(vocab, budget - 1, arity))
      options.push_back(std::move(sub));

  std::vector<TernaryPtr> result;
  std::vector<int> pick(static_cast<std::size_t>(arity), 0);
  for (TokenId w = 1; w < vocab; ++w) {
    pick.assign(pick.size(), 0);
    while (true) {
      auto node = std::make_unique<TernaryNode>(w);
      for (int k = 0; k < arity; ++k) node->slot[k] = clone(*options[pick[k]]);
      result.push_back(std::move(node));
      int k = arity - 1;
      while (k >= 0 && ++pick[k] == static_cast<int>(options.size())) pick[k--] = 0;
      if (k < 0) break;
    }
  }
  return result;
}

}  // namespace detail

// Every padded tree whose word nodes sit at depth <= max_word_depth (root
// depth 1), including the single-EOB tree. Word tokens are all non-EOB ids.
inline std::vector<TernaryPtr> enumerate_padded_trees(int vocab, int max_word_depth,
                                                      int arity) {
  if (padded_tree_count(vocab, max_word_depth, arity) > 500000)
    throw std::invalid_argument("enumerate_padded_trees: too many trees");
  std::vector<TernaryPtr> trees;
  trees.push_back(std::make_unique<TernaryNode>(kEob));
  for (auto& sub : detail::word_subtrees(vocab, max_word_depth, arity))
    trees.push_back(std::move(sub));
  return trees;
}

}  // namespace treedec::testing
