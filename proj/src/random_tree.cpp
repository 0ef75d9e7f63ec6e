#include "treedec/random_tree.hpp"

#include <deque>
#include <unordered_map>

#include "treedec/canonicalize.hpp"

namespace treedec {

SpNode random_sp_tree(int n, Rng& rng, int max_children) {
  if (n < 1) throw TreeError("random_sp_tree: n must be positive");
  SpNode root(static_cast<TokenId>(2));
  int made = 1;
  int remaining = n - 1;
  std::deque<SpNode*> queue{&root};
  while (remaining > 0) {
    SpNode* node = queue.front();
    queue.pop_front();
    const int hi = std::min(max_children, remaining);
    const int lo = queue.empty() ? 1 : 0;
    const int count = uniform_int(rng, lo, hi);
    remaining -= count;
    node->children.reserve(count);
    for (int j = 0; j < count; ++j) {
      node->children.emplace_back(static_cast<TokenId>(2 + made++));
      queue.push_back(&node->children[j]);
    }
  }
  // tags drawn after shapes so the shape stream is stable for a given seed
  std::deque<SpNode*> walk{&root};
  while (!walk.empty()) {
    SpNode* node = walk.front();
    walk.pop_front();
    node->tag = uniform_int(rng, 0, static_cast<int>(node->children.size()));
    for (SpNode& c : node->children) walk.push_back(&c);
  }
  return root;
}

namespace {

void fill_heads(const SpNode& node, const std::unordered_map<TokenId, int>& pos,
                std::vector<int>& head) {
  const int p = pos.at(node.token);
  for (const SpNode& c : node.children) {
    head[pos.at(c.token)] = p;
    fill_heads(c, pos, head);
  }
}

}  // namespace

DependencyTree random_projective_dep(int n, Rng& rng, int max_children) {
  SpNode tree = random_sp_tree(n, rng, max_children);
  const std::vector<TokenId> order = flatten_sp(tree);
  std::unordered_map<TokenId, int> pos;
  for (int i = 0; i < n; ++i) pos[order[i]] = i;

  DependencyTree dep;
  dep.tokens.resize(n);
  for (int i = 0; i < n; ++i) dep.tokens[i] = "w" + std::to_string(i);
  dep.head.assign(n, -1);
  dep.root = pos.at(tree.token);
  fill_heads(tree, pos, dep.head);
  return dep;
}

}  // namespace treedec
