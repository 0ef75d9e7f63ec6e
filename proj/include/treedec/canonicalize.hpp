#pragma once

#include <vector>

#include "treedec/tree.hpp"

namespace treedec {

// In-order traversal of an SP tree: the first tag(t) children, then t, then
// the rest. Throws TreeError when a tag exceeds its child count.
std::vector<TokenId> flatten_sp(const SpNode& root);

// Rewrites an SP tree as a ternary tree: c_1 becomes the left child when the
// tag is at least 1, c_{tag+1} the middle child, every other c_j the right
// child of c_{j-1}'s image. Tags are copied onto the ternary nodes.
TernaryPtr canonicalize(const SpNode& root);

// Inverse of canonicalize. Expects tags present and no end-of-branch
// padding; throws TreeError on malformed input.
SpNode decanonicalize(const TernaryNode& root);

// In-order traversal (left, node, middle, right) skipping end-of-branch
// nodes. Equals flatten_sp of the decanonicalized tree.
std::vector<TokenId> flatten_ternary(const TernaryNode& root);

// Fills every empty slot of every non-EOB node with an EOB leaf. For a tree
// of n words the result has exactly 3n+1 nodes, 2n+1 of them EOB. Idempotent.
TernaryPtr pad_eob(const TernaryNode& root);

// Inverse of pad_eob: drops EOB leaves. Returns nullptr for an all-EOB tree.
TernaryPtr strip_eob(const TernaryNode& root);

// True when every non-EOB node has exactly `arity` children in the leading
// slots and every leaf is EOB.
bool is_padded_full(const TernaryNode& root, int arity = 3);

// Builds the SP tree of a dependency parse; token_ids[i] labels position i.
// The in-order traversal of the result reproduces surface order; a parse
// admitting no such traversal (non-projective) is rejected with TreeError.
SpNode dep_to_sp(const DependencyTree& dep, const std::vector<TokenId>& token_ids);

}  // namespace treedec
