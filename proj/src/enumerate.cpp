#include "treedec/enumerate.hpp"

#include <stdexcept>
#include <vector>

namespace treedec {

namespace {

void check_enum_n(int n) {
  if (n < 1) throw std::invalid_argument("enumeration: n must be positive");
  if (n > kMaxEnumNodes)
    throw std::invalid_argument("enumeration: n > " + std::to_string(kMaxEnumNodes) +
                                " refused");
}

// All ordered tree shapes with n nodes. Tokens and tags are left at their
// defaults; only the child structure matters.
std::vector<SpNode> ordered_shapes(int n) {
  if (n == 1) return {SpNode{}};
  std::vector<SpNode> shapes;
  // first subtree takes f nodes, the rest form the remaining forest of the root
  for (int f = 1; f < n; ++f) {
    std::vector<SpNode> firsts = ordered_shapes(f);
    std::vector<SpNode> rests = ordered_shapes(n - f);
    for (const SpNode& first : firsts)
      for (const SpNode& rest : rests) {
        SpNode shape;
        shape.children.push_back(first);
        shape.children.insert(shape.children.end(), rest.children.begin(),
                              rest.children.end());
        shapes.push_back(std::move(shape));
      }
  }
  return shapes;
}

std::uint64_t tag_assignments(const SpNode& shape) {
  std::uint64_t product = shape.children.size() + 1;
  for (const SpNode& c : shape.children) product *= tag_assignments(c);
  return product;
}

// Binary shapes with n nodes, counted over every (left size, right size)
// split; no memoization, the cap keeps this cheap.
std::uint64_t binary_shapes(int n) {
  if (n == 0) return 1;
  std::uint64_t total = 0;
  for (int left = 0; left < n; ++left)
    total += binary_shapes(left) * binary_shapes(n - 1 - left);
  return total;
}

}  // namespace

std::uint64_t count_sp_trees(int n) {
  check_enum_n(n);
  std::uint64_t total = 0;
  for (const SpNode& shape : ordered_shapes(n)) total += tag_assignments(shape);
  return total;
}

std::uint64_t count_ordered_trees(int n) {
  check_enum_n(n);
  return static_cast<std::uint64_t>(ordered_shapes(n).size());
}

std::uint64_t count_lcrs_trees(int n) {
  check_enum_n(n);
  // the root of an LCRS tree has no right child: all n-1 remaining nodes
  // form its left subtree's shape
  return binary_shapes(n - 1);
}

}  // namespace treedec
