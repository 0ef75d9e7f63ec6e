#include "treedec/depth_stats.hpp"

#include <algorithm>
#include <map>

namespace treedec {

namespace {

void accumulate_depths(const TernaryNode& node, int depth, long& sum, long& words) {
  if (!node.is_eob()) {
    sum += depth;
    ++words;
  }
  for (const auto& s : node.slot)
    if (s) accumulate_depths(*s, depth + 1, sum, words);
}

}  // namespace

double mean_word_depth(const TernaryNode& tree) {
  long sum = 0, words = 0;
  accumulate_depths(tree, 1, sum, words);
  return words == 0 ? 0.0 : static_cast<double>(sum) / static_cast<double>(words);
}

std::vector<DepthStatsRow> depth_stats(const std::vector<const TernaryNode*>& trees) {
  struct Bucket {
    long depth_sum = 0;
    long word_nodes = 0;
    int trees = 0;
  };
  std::map<int, Bucket> buckets;
  for (const TernaryNode* tree : trees) {
    if (!tree) continue;
    long sum = 0, words = 0;
    accumulate_depths(*tree, 1, sum, words);
    if (words == 0) continue;
    Bucket& b = buckets[static_cast<int>(words)];
    b.depth_sum += sum;
    b.word_nodes += words;
    b.trees += 1;
  }
  std::vector<DepthStatsRow> rows;
  rows.reserve(buckets.size());
  for (const auto& [length, b] : buckets) {
    DepthStatsRow row;
    row.length = length;
    row.trees = b.trees;
    row.mean_depth = static_cast<double>(b.depth_sum) / static_cast<double>(b.word_nodes);
    row.chain_baseline = (length + 1) / 2.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace treedec
