#include "ultracomb/tree.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>
#include <utility>

#include "ultracomb/error.h"

namespace ultracomb {

auto Tree::add_node(Node_index parent, double depth, std::string label) -> Node_index {
  auto index = static_cast<Node_index>(nodes_.size());
  if (parent == k_no_node) {
    if (root_ != k_no_node) throw Validation_error{"tree already has a root"};
    root_ = index;
  } else if (parent < 0 || parent >= index) {
    throw Validation_error{"parent must be added before its children"};
  }
  nodes_.push_back(Tree_node{parent, {}, depth, std::move(label)});
  if (parent != k_no_node) nodes_[static_cast<std::size_t>(parent)].children.push_back(index);
  return index;
}

auto Tree::leaves() const -> std::vector<Node_index> {
  auto out = std::vector<Node_index>{};
  if (root_ == k_no_node) return out;
  auto stack = std::vector<Node_index>{root_};
  while (!stack.empty()) {
    auto n = stack.back();
    stack.pop_back();
    const auto& kids = at(n).children;
    if (kids.empty()) out.push_back(n);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

auto Tree::find_leaf(std::string_view label) const -> Node_index {
  for (auto i = Node_index{0}; i < static_cast<Node_index>(nodes_.size()); ++i) {
    if (is_leaf(i) && at(i).label == label) return i;
  }
  return k_no_node;
}

auto Tree::branch_length(Node_index n) const -> double {
  const auto& node = at(n);
  return node.parent == k_no_node ? node.depth : node.depth - at(node.parent).depth;
}

auto Tree::lca(Node_index a, Node_index b) const -> Node_index {
  auto ancestors = std::vector<Node_index>{};
  for (auto n = a; n != k_no_node; n = at(n).parent) ancestors.push_back(n);
  std::sort(ancestors.begin(), ancestors.end());
  for (auto n = b; n != k_no_node; n = at(n).parent) {
    if (std::binary_search(ancestors.begin(), ancestors.end(), n)) return n;
  }
  return k_no_node;
}

auto Tree::path_length(Node_index a, Node_index b) const -> double {
  auto w = lca(a, b);
  return at(a).depth + at(b).depth - 2.0 * at(w).depth;
}

auto Tree::distance(Edge_point a, Edge_point b) const -> double {
  auto depth_a = at(a.node).depth - a.up;
  auto depth_b = at(b.node).depth - b.up;
  auto w = lca(a.node, b.node);
  // When one node is an ancestor of the other, the meeting point is the
  // shallower of the two points themselves.
  auto meet = (w == a.node || w == b.node) ? std::min(depth_a, depth_b) : at(w).depth;
  return depth_a + depth_b - 2.0 * meet;
}

void Tree::collapse_zero_edges() {
  if (root_ == k_no_node) return;
  auto order = std::vector<Node_index>{root_};
  for (auto i = std::size_t{0}; i < order.size(); ++i) {
    auto n = order[i];
    auto changed = true;
    while (changed) {
      changed = false;
      auto& kids = nodes_[static_cast<std::size_t>(n)].children;
      for (auto k = std::size_t{0}; k < kids.size(); ++k) {
        auto c = kids[k];
        auto& child = nodes_[static_cast<std::size_t>(c)];
        if (!child.children.empty() && child.depth == nodes_[static_cast<std::size_t>(n)].depth) {
          auto grand = std::exchange(child.children, {});
          for (auto g : grand) nodes_[static_cast<std::size_t>(g)].parent = n;
          child.parent = k_no_node;
          kids.erase(kids.begin() + static_cast<std::ptrdiff_t>(k));
          kids.insert(kids.begin() + static_cast<std::ptrdiff_t>(k), grand.begin(), grand.end());
          changed = true;
          break;
        }
      }
    }
    for (auto c : nodes_[static_cast<std::size_t>(n)].children) order.push_back(c);
  }

  // Compact away the detached nodes, keeping parents before children.
  auto remap = std::vector<Node_index>(nodes_.size(), k_no_node);
  auto kept = std::vector<Tree_node>{};
  kept.reserve(order.size());
  for (auto n : order) {
    remap[static_cast<std::size_t>(n)] = static_cast<Node_index>(kept.size());
    kept.push_back(std::move(nodes_[static_cast<std::size_t>(n)]));
  }
  for (auto& node : kept) {
    if (node.parent != k_no_node) node.parent = remap[static_cast<std::size_t>(node.parent)];
    for (auto& c : node.children) c = remap[static_cast<std::size_t>(c)];
  }
  nodes_ = std::move(kept);
  root_ = 0;
}

namespace {

void write_length(std::ostringstream& os, double length, int digits) {
  os.precision(digits);
  os << ':' << length;
}

}  // namespace

auto Tree::to_newick(int digits) const -> std::string {
  auto os = std::ostringstream{};
  if (root_ == k_no_node) return ";";

  // Iterative post-order so very deep caterpillars do not blow the stack.
  struct Frame {
    Node_index node;
    std::size_t next_child;
  };
  auto stack = std::vector<Frame>{{root_, 0}};
  while (!stack.empty()) {
    auto& frame = stack.back();
    const auto& node = at(frame.node);
    if (node.children.empty()) {
      os << node.label;
      if (frame.node != root_ || node.depth > 0.0) write_length(os, branch_length(frame.node), digits);
      stack.pop_back();
      if (!stack.empty()) ++stack.back().next_child;
      continue;
    }
    if (frame.next_child == 0) os << '(';
    if (frame.next_child < node.children.size()) {
      if (frame.next_child > 0) os << ',';
      stack.push_back({node.children[frame.next_child], 0});
      continue;
    }
    os << ')' << node.label;
    if (frame.node != root_ || node.depth > 0.0) write_length(os, branch_length(frame.node), digits);
    stack.pop_back();
    if (!stack.empty()) ++stack.back().next_child;
  }
  os << ';';
  return os.str();
}

namespace {

class Newick_parser {
 public:
  explicit Newick_parser(std::string_view text) : text_{text} {}

  auto parse() -> Tree {
    skip();
    struct Pending {
      Node_index parent;
      std::string label;
      double length;
      std::vector<std::size_t> children;
    };
    // Parse into an intermediate forest first: lengths are only known after
    // a node's subtree is read, but depths need them top-down.
    auto pending = std::vector<Pending>{};
    auto parse_node = [&](auto& self) -> std::size_t {
      auto me = pending.size();
      pending.push_back({k_no_node, {}, 0.0, {}});
      skip();
      if (peek() == '(') {
        ++pos_;
        while (true) {
          auto child = self(self);
          pending[me].children.push_back(child);
          skip();
          if (peek() == ',') {
            ++pos_;
            continue;
          }
          expect(')');
          break;
        }
      }
      skip();
      pending[me].label = read_label();
      skip();
      if (peek() == ':') {
        ++pos_;
        skip();
        pending[me].length = read_number();
      }
      return me;
    };
    auto top = parse_node(parse_node);
    skip();
    expect(';');

    auto tree = Tree{};
    struct Item {
      std::size_t pending_index;
      Node_index parent;
      double depth;
    };
    auto stack = std::vector<Item>{{top, k_no_node, pending[top].length}};
    while (!stack.empty()) {
      auto item = stack.back();
      stack.pop_back();
      auto& p = pending[item.pending_index];
      auto id = tree.add_node(item.parent, item.depth, p.label);
      for (auto it = p.children.rbegin(); it != p.children.rend(); ++it) {
        stack.push_back({*it, id, item.depth + pending[*it].length});
      }
    }
    return tree;
  }

 private:
  auto peek() const -> char { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip() {
    while (pos_ < text_.size()) {
      auto c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '[') {
        auto close = text_.find(']', pos_);
        if (close == std::string_view::npos) throw Validation_error{"unterminated Newick comment"};
        pos_ = close + 1;
      } else {
        break;
      }
    }
  }

  void expect(char c) {
    if (peek() != c) {
      throw Validation_error{"Newick: expected '" + std::string(1, c) + "' at offset " + std::to_string(pos_)};
    }
    ++pos_;
  }

  auto read_label() -> std::string {
    auto start = pos_;
    while (pos_ < text_.size() && std::string_view{"(),:;[ \t\n\r"}.find(text_[pos_]) == std::string_view::npos) ++pos_;
    return std::string{text_.substr(start, pos_ - start)};
  }

  auto read_number() -> double {
    auto start = pos_;
    while (pos_ < text_.size() && std::string_view{"0123456789+-.eE"}.find(text_[pos_]) != std::string_view::npos) ++pos_;
    auto token = std::string{text_.substr(start, pos_ - start)};
    try {
      auto used = std::size_t{0};
      auto v = std::stod(token, &used);
      if (used != token.size()) throw Validation_error{"bad branch length"};
      return v;
    } catch (const std::logic_error&) {
      throw Validation_error{"Newick: bad branch length '" + token + "'"};
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

auto Tree::from_newick(std::string_view text) -> Tree { return Newick_parser{text}.parse(); }

}  // namespace ultracomb
