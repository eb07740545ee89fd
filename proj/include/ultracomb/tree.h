#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ultracomb {

using Node_index = std::int32_t;
inline constexpr Node_index k_no_node = -1;

struct Tree_node {
  Node_index parent = k_no_node;
  std::vector<Node_index> children;  // planar order, left to right
  double depth = 0.0;                // distance from the root point
  std::string label;
};

// A point on the tree: `up` units above `node` along the edge to its parent
// (0 <= up <= branch_length(node)).
struct Edge_point {
  Node_index node = k_no_node;
  double up = 0.0;
};

// Rooted, edge-lengthed tree.  Node depths are stored directly, so every
// path length is a difference of stored values.  The root point sits at
// depth 0; the root node may sit deeper, in which case the root edge has
// length depth(root).
class Tree {
 public:
  auto add_node(Node_index parent, double depth, std::string label = {}) -> Node_index;

  auto root() const -> Node_index { return root_; }
  auto size() const -> std::size_t { return nodes_.size(); }
  auto at(Node_index n) const -> const Tree_node& { return nodes_.at(static_cast<std::size_t>(n)); }
  auto is_leaf(Node_index n) const -> bool { return at(n).children.empty(); }
  auto leaves() const -> std::vector<Node_index>;  // planar order
  auto find_leaf(std::string_view label) const -> Node_index;

  auto branch_length(Node_index n) const -> double;
  auto lca(Node_index a, Node_index b) const -> Node_index;
  auto path_length(Node_index a, Node_index b) const -> double;
  auto distance(Edge_point a, Edge_point b) const -> double;

  // Replace every child edge of zero length by the child's own children,
  // turning tied splits into polytomies.  Labels of removed internal nodes
  // are dropped.
  void collapse_zero_edges();

  // Standard Newick with branch lengths at `digits` significant digits.
  auto to_newick(int digits = 12) const -> std::string;
  static auto from_newick(std::string_view text) -> Tree;

 private:
  std::vector<Tree_node> nodes_;
  Node_index root_ = k_no_node;
};

}  // namespace ultracomb
