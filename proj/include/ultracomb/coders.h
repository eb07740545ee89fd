#pragma once

#include <vector>

#include "ultracomb/comb.h"
#include "ultracomb/tree.h"

namespace ultracomb {

// One upward jump of a contour: h(time-) = before, h(time) = after.
struct Contour_jump {
  double time = 0.0;
  double before = 0.0;
  double after = 0.0;
};

// Piecewise-linear cadlag contour: nonnegative jumps, slope -1 in between,
// starting from 0 and absorbed at 0 at support_end().  Zero-size jumps are
// dropped on construction.
class Contour_function {
 public:
  explicit Contour_function(std::vector<Contour_jump> jumps);

  auto jumps() const -> const std::vector<Contour_jump>& { return jumps_; }
  // Position of each kept jump in the constructor's input.
  auto source_index(std::size_t jump) const -> std::size_t { return source_index_[jump]; }
  auto support_end() const -> double { return support_end_; }

  auto value(double t) const -> double;
  // inf of h over [s, t] (s <= t), including left limits at jumps in (s, t].
  auto infimum(double s, double t) const -> double;
  // d_h(s, t) = h(s) + h(t) - 2 inf_[s,t] h.
  auto distance(double s, double t) const -> double;

 private:
  auto piece_of(double t) const -> std::ptrdiff_t;

  std::vector<Contour_jump> jumps_;
  std::vector<std::size_t> source_index_;
  double support_end_ = 0.0;
};

// Tree coded by a contour.  Each jump is a vertical segment from height
// `before` to `after`; its bottom hangs on the rightmost earlier segment
// spanning that height.  The tip of jump i is labelled with its input index.
class Contour_tree {
 public:
  explicit Contour_tree(const Contour_function& h);

  auto tree() const -> const Tree& { return tree_; }
  // p_h(t): the tree point visited at time t.
  auto locate(double t) const -> Edge_point;

 private:
  auto segment_holding(std::ptrdiff_t last_jump, double height) const -> std::ptrdiff_t;

  const Contour_function* h_;
  Tree tree_;
  // Per segment: (height, node) for every node on it, ascending.
  std::vector<std::vector<std::pair<double, Node_index>>> segment_nodes_;
};

auto tree_from_contour(const Contour_function& h) -> Tree;

// Times at which h equals `level`, merged where consecutive visits are the
// same tree point (the excursion between them never goes below the level).
auto level_visits(const Contour_function& h, double level) -> std::vector<double>;

// Comb of the sphere at distance `level` from the root: one tooth per
// excursion below the level between consecutive visits, height equal to the
// excursion depth; visit k occupies the unit interval [k, k+1).
auto sphere_comb_from_contour(const Contour_function& h, double level) -> Comb;

// Jumping contour of tau_f(T): jump to T, descend by each tooth height in
// turn and jump back to T.
auto contour_from_comb(const Comb& c) -> Contour_function;

}  // namespace ultracomb
