#pragma once

#include <vector>

#include "treedec/tree.hpp"

namespace treedec {

// Per-sentence-length depth summary. Depth counts the node itself, so a
// root sits at depth 1 and a chain of length T averages (T+1)/2 — the same
// number of steps a chain decoder's hidden state carries on average.
struct DepthStatsRow {
  int length = 0;        // words per tree
  int trees = 0;         // trees of this length seen
  double mean_depth = 0; // mean depth over all word nodes of these trees
  double chain_baseline = 0;  // (length + 1) / 2
};

// Groups trees by word count; EOB nodes are ignored. Rows sorted by length.
std::vector<DepthStatsRow> depth_stats(const std::vector<const TernaryNode*>& trees);

double mean_word_depth(const TernaryNode& tree);

}  // namespace treedec
