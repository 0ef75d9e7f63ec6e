#include "treedec/canonicalize.hpp"

#include <algorithm>
#include <numeric>

namespace treedec {

namespace {

void flatten_sp_into(const SpNode& node, std::vector<TokenId>& out) {
  const int n = static_cast<int>(node.children.size());
  if (node.tag < 0 || node.tag > n)
    throw TreeError("sp tag " + std::to_string(node.tag) + " exceeds child count " +
                    std::to_string(n));
  for (int j = 0; j < node.tag; ++j) flatten_sp_into(node.children[j], out);
  out.push_back(node.token);
  for (int j = node.tag; j < n; ++j) flatten_sp_into(node.children[j], out);
}

}  // namespace

std::vector<TokenId> flatten_sp(const SpNode& root) {
  std::vector<TokenId> out;
  flatten_sp_into(root, out);
  return out;
}

TernaryPtr canonicalize(const SpNode& node) {
  const int n = static_cast<int>(node.children.size());
  if (node.tag < 0 || node.tag > n)
    throw TreeError("sp tag " + std::to_string(node.tag) + " exceeds child count " +
                    std::to_string(n));
  auto image = std::make_unique<TernaryNode>(node.token, node.tag);
  TernaryNode* last = nullptr;
  for (int j = 1; j <= n; ++j) {
    TernaryPtr current = canonicalize(node.children[j - 1]);
    TernaryNode* raw = current.get();
    if (j == 1 && j <= node.tag)
      image->slot[0] = std::move(current);
    else if (j == node.tag + 1)
      image->slot[1] = std::move(current);
    else
      last->slot[2] = std::move(current);
    last = raw;
  }
  return image;
}

namespace {

// Collects a node and its right-child chain; these were siblings in the
// source SP tree.
std::vector<const TernaryNode*> right_chain(const TernaryNode* node) {
  std::vector<const TernaryNode*> chain;
  for (; node; node = node->right()) chain.push_back(node);
  return chain;
}

// Rebuilds the SP node for `node`, consuming only its left and middle slots;
// the right slot belongs to the parent's sibling chain.
SpNode rebuild_sp(const TernaryNode& node) {
  if (node.is_eob()) throw TreeError("decanonicalize: padded (eob) node");
  if (!node.tag.has_value()) throw TreeError("decanonicalize: node without tag");
  SpNode sp(node.token, *node.tag);
  std::vector<const TernaryNode*> left = right_chain(node.left());
  std::vector<const TernaryNode*> middle = right_chain(node.middle());
  if (static_cast<int>(left.size()) != *node.tag)
    throw TreeError("decanonicalize: left chain length " + std::to_string(left.size()) +
                    " does not match tag " + std::to_string(*node.tag));
  sp.children.reserve(left.size() + middle.size());
  for (const TernaryNode* c : left) sp.children.push_back(rebuild_sp(*c));
  for (const TernaryNode* c : middle) sp.children.push_back(rebuild_sp(*c));
  return sp;
}

}  // namespace

SpNode decanonicalize(const TernaryNode& root) {
  if (root.right()) throw TreeError("decanonicalize: root has a right child");
  return rebuild_sp(root);
}

namespace {

void flatten_ternary_into(const TernaryNode& node, std::vector<TokenId>& out) {
  if (node.is_eob()) return;
  if (node.left()) flatten_ternary_into(*node.left(), out);
  out.push_back(node.token);
  if (node.middle()) flatten_ternary_into(*node.middle(), out);
  if (node.right()) flatten_ternary_into(*node.right(), out);
}

}  // namespace

std::vector<TokenId> flatten_ternary(const TernaryNode& root) {
  std::vector<TokenId> out;
  flatten_ternary_into(root, out);
  return out;
}

namespace {

void pad_in_place(TernaryNode& node) {
  if (node.is_eob()) {
    if (!node.is_leaf()) throw TreeError("pad_eob: eob node with children");
    return;
  }
  for (auto& s : node.slot) {
    if (!s) s = std::make_unique<TernaryNode>(kEob);
    pad_in_place(*s);
  }
}

}  // namespace

TernaryPtr pad_eob(const TernaryNode& root) {
  TernaryPtr padded = clone(root);
  pad_in_place(*padded);
  return padded;
}

TernaryPtr strip_eob(const TernaryNode& root) {
  if (root.is_eob()) return nullptr;
  auto stripped = std::make_unique<TernaryNode>(root.token);
  stripped->tag = root.tag;
  for (int k = 0; k < 3; ++k)
    if (root.slot[k]) stripped->slot[k] = strip_eob(*root.slot[k]);
  return stripped;
}

bool is_padded_full(const TernaryNode& root, int arity) {
  if (root.is_eob()) return root.is_leaf();
  for (int k = 0; k < arity; ++k)
    if (!root.slot[k] || !is_padded_full(*root.slot[k], arity)) return false;
  for (int k = arity; k < 3; ++k)
    if (root.slot[k]) return false;
  return true;
}

namespace {

// SP tree over surface positions; children ordered by position, tag = number
// of children preceding the node in the sentence.
SpNode position_sp(int pos, const std::vector<std::vector<int>>& kids) {
  SpNode node(static_cast<TokenId>(pos));
  int tag = 0;
  for (int c : kids[pos]) {
    if (c < pos) ++tag;
    node.children.push_back(position_sp(c, kids));
  }
  node.tag = tag;
  return node;
}

void relabel(SpNode& node, const std::vector<TokenId>& ids) {
  node.token = ids[node.token];
  for (SpNode& c : node.children) relabel(c, ids);
}

}  // namespace

SpNode dep_to_sp(const DependencyTree& dep, const std::vector<TokenId>& token_ids) {
  const int n = static_cast<int>(dep.size());
  if (n == 0) throw TreeError("dep_to_sp: empty sentence");
  if (static_cast<int>(token_ids.size()) != n)
    throw TreeError("dep_to_sp: token id count does not match sentence length");
  if (dep.root < 0 || dep.root >= n || dep.head.size() != dep.size())
    throw TreeError("dep_to_sp: malformed dependency tree");

  std::vector<std::vector<int>> kids(n);
  for (int i = 0; i < n; ++i) {
    if (i == dep.root) {
      if (dep.head[i] != -1) throw TreeError("dep_to_sp: root with a head");
      continue;
    }
    if (dep.head[i] < 0 || dep.head[i] >= n)
      throw TreeError("dep_to_sp: head index out of range at position " + std::to_string(i));
    kids[dep.head[i]].push_back(i);
  }
  // children lists are in surface order by construction

  SpNode root = position_sp(dep.root, kids);
  if (node_count(root) != n)
    throw TreeError("dep_to_sp: head links do not form a tree");

  std::vector<TokenId> order = flatten_sp(root);
  for (int i = 0; i < n; ++i)
    if (order[i] != i)
      throw TreeError("dep_to_sp: non-projective parse (in-order traversal cannot "
                      "reproduce surface order)");

  relabel(root, token_ids);
  return root;
}

}  // namespace treedec
