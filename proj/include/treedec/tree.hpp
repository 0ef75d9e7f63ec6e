#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace treedec {

using TokenId = std::int32_t;

// Reserved vocabulary slots. Every Vocabulary places these two first, so
// tree code can test for end-of-branch without a vocabulary at hand.
inline constexpr TokenId kEob = 0;
inline constexpr TokenId kUnk = 1;

struct TreeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Ordered tree node carrying a position tag: the first `tag` children sit to
// the node's left in the flattened sequence, the remaining ones to its right.
struct SpNode {
  TokenId token = kUnk;
  int tag = 0;
  std::vector<SpNode> children;

  SpNode() = default;
  explicit SpNode(TokenId t, int g = 0) : token(t), tag(g) {}
};

// Node of a ternary tree. Slots are left, middle, right in that order.
// `tag` is carried over from the source SP node by canonicalize(); trees
// produced by the decoder have no tags.
struct TernaryNode {
  TokenId token = kEob;
  std::optional<int> tag;
  std::array<std::unique_ptr<TernaryNode>, 3> slot;

  TernaryNode() = default;
  explicit TernaryNode(TokenId t) : token(t) {}
  TernaryNode(TokenId t, int g) : token(t), tag(g) {}

  bool is_eob() const { return token == kEob; }
  bool is_leaf() const { return !slot[0] && !slot[1] && !slot[2]; }

  TernaryNode* left() const { return slot[0].get(); }
  TernaryNode* middle() const { return slot[1].get(); }
  TernaryNode* right() const { return slot[2].get(); }
};

using TernaryPtr = std::unique_ptr<TernaryNode>;

// Dependency parse of a sentence: tokens in surface order, head[i] the
// position of token i's head, -1 for the root.
struct DependencyTree {
  std::vector<std::string> tokens;
  std::vector<int> head;
  int root = -1;

  std::size_t size() const { return tokens.size(); }
};

inline TernaryPtr clone(const TernaryNode& node) {
  auto copy = std::make_unique<TernaryNode>(node.token);
  copy->tag = node.tag;
  for (int k = 0; k < 3; ++k)
    if (node.slot[k]) copy->slot[k] = clone(*node.slot[k]);
  return copy;
}

// Structural equality over token, tag and children. A present tag never
// equals an absent one.
inline bool equal(const SpNode& a, const SpNode& b) {
  if (a.token != b.token || a.tag != b.tag) return false;
  if (a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!equal(a.children[i], b.children[i])) return false;
  return true;
}

inline bool equal(const TernaryNode& a, const TernaryNode& b) {
  if (a.token != b.token || a.tag != b.tag) return false;
  for (int k = 0; k < 3; ++k) {
    if (static_cast<bool>(a.slot[k]) != static_cast<bool>(b.slot[k])) return false;
    if (a.slot[k] && !equal(*a.slot[k], *b.slot[k])) return false;
  }
  return true;
}

inline int node_count(const SpNode& node) {
  int n = 1;
  for (const SpNode& c : node.children) n += node_count(c);
  return n;
}

// Counts every node, end-of-branch leaves included.
inline int node_count(const TernaryNode& node) {
  int n = 1;
  for (int k = 0; k < 3; ++k)
    if (node.slot[k]) n += node_count(*node.slot[k]);
  return n;
}

inline int word_count(const TernaryNode& node) {
  int n = node.is_eob() ? 0 : 1;
  for (int k = 0; k < 3; ++k)
    if (node.slot[k]) n += word_count(*node.slot[k]);
  return n;
}

inline int eob_count(const TernaryNode& node) {
  return node_count(node) - word_count(node);
}

}  // namespace treedec
