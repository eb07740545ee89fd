#include "ultracomb/comb.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ultracomb/error.h"

namespace ultracomb {

Comb::Comb(double interval_length, double origin_height, std::vector<Tooth> teeth, double truncation)
    : interval_length_{interval_length},
      origin_height_{origin_height},
      teeth_{std::move(teeth)},
      truncation_{truncation} {
  if (!(std::isfinite(interval_length_) && interval_length_ > 0.0)) {
    throw Validation_error{"comb interval length must be positive and finite"};
  }
  if (!(std::isfinite(origin_height_) && origin_height_ > 0.0)) {
    throw Validation_error{"comb origin height must be positive and finite"};
  }
  if (!(std::isfinite(truncation_) && truncation_ >= 0.0)) {
    throw Validation_error{"comb truncation level must be nonnegative"};
  }
  auto previous = 0.0;
  for (auto i = std::size_t{0}; i < teeth_.size(); ++i) {
    const auto& t = teeth_[i];
    if (!(t.position > previous && t.position < interval_length_)) {
      throw Validation_error{"tooth " + std::to_string(i) +
                             ": positions must be strictly increasing inside (0, interval_length)"};
    }
    if (!(std::isfinite(t.height) && t.height > 0.0)) {
      throw Validation_error{"tooth " + std::to_string(i) + ": height must be positive"};
    }
    if (!(t.height < origin_height_)) {
      throw Validation_error{"tooth " + std::to_string(i) + ": height must be below the origin height"};
    }
    previous = t.position;
  }
}

auto Comb::max_height() const -> double {
  auto m = 0.0;
  for (const auto& t : teeth_) m = std::max(m, t.height);
  return m;
}

auto Comb::interval_of(double position) const -> std::size_t {
  auto it = std::upper_bound(teeth_.begin(), teeth_.end(), position,
                             [](double x, const Tooth& t) { return x < t.position; });
  return static_cast<std::size_t>(it - teeth_.begin());
}

namespace {

void check_point(const Comb& c, Boundary_point p) {
  if (!(p.position >= 0.0 && p.position <= c.interval_length())) {
    throw Validation_error{"boundary point outside [0, interval_length]"};
  }
  if (p.position == 0.0 && p.face == Face::left) {
    throw Validation_error{"the left face of 0 is not a boundary point"};
  }
}

auto point_less(Boundary_point a, Boundary_point b) -> bool {
  if (a.position != b.position) return a.position < b.position;
  return a.face == Face::left && b.face == Face::right;
}

// Max height over teeth with position in the range between lo and hi, with
// the endpoint teeth included or not.
auto range_max(std::span<const Tooth> teeth, double lo, bool lo_closed, double hi, bool hi_closed) -> double {
  auto by_pos = [](const Tooth& t, double x) { return t.position < x; };
  auto it = std::lower_bound(teeth.begin(), teeth.end(), lo, by_pos);
  auto m = 0.0;
  for (; it != teeth.end() && it->position <= hi; ++it) {
    if (it->position == lo && !lo_closed) continue;
    if (it->position == hi && !hi_closed) continue;
    m = std::max(m, it->height);
  }
  return m;
}

}  // namespace

auto comb_distance(const Comb& c, Boundary_point p, Boundary_point q) -> double {
  check_point(c, p);
  check_point(c, q);
  if (p.position == q.position) {
    if (p.face == q.face) return 0.0;
    return 2.0 * range_max(c.teeth(), p.position, true, p.position, true);
  }
  if (q.position < p.position) std::swap(p, q);
  return 2.0 * range_max(c.teeth(), p.position, p.face == Face::left, q.position, q.face == Face::right);
}

auto comb_distance(const Comb& c, double s, double t) -> double {
  return comb_distance(c, Boundary_point{s, Face::right}, Boundary_point{t, Face::right});
}

void Partition::normalize() {
  for (auto& b : blocks) std::sort(b.begin(), b.end());
  std::erase_if(blocks, [](const auto& b) { return b.empty(); });
  std::sort(blocks.begin(), blocks.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

auto Partition::element_count() const -> std::size_t {
  auto n = std::size_t{0};
  for (const auto& b : blocks) n += b.size();
  return n;
}

auto Partition::refines(const Partition& coarser) const -> bool {
  auto owner = std::vector<std::size_t>(element_count(), SIZE_MAX);
  for (auto k = std::size_t{0}; k < coarser.blocks.size(); ++k) {
    for (auto i : coarser.blocks[k]) {
      if (i >= owner.size()) return false;
      owner[i] = k;
    }
  }
  for (const auto& b : blocks) {
    for (auto i : b) {
      if (i >= owner.size() || owner[i] != owner[b.front()]) return false;
    }
  }
  return true;
}

auto ball_partition(const Comb& c, std::span<const Boundary_point> points, double r) -> Partition {
  if (!(r > 0.0)) throw Validation_error{"ball radius must be positive"};
  auto out = Partition{};
  if (points.empty()) return out;
  for (auto p : points) check_point(c, p);

  auto order = std::vector<std::size_t>(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return point_less(points[a], points[b]); });

  out.blocks.push_back({order[0]});
  for (auto k = std::size_t{1}; k < order.size(); ++k) {
    auto gap = comb_distance(c, points[order[k - 1]], points[order[k]]);
    if (gap > r) out.blocks.emplace_back();
    out.blocks.back().push_back(order[k]);
  }
  out.normalize();
  return out;
}

auto ball_partition(const Comb& c, std::span<const double> positions, double r) -> Partition {
  auto points = std::vector<Boundary_point>{};
  points.reserve(positions.size());
  for (auto x : positions) points.push_back({x, Face::right});
  return ball_partition(c, points, r);
}

auto pairwise_distances(const Comb& c, std::span<const double> positions) -> Distance_matrix {
  auto d = Distance_matrix{positions.size()};
  for (auto i = std::size_t{0}; i < positions.size(); ++i) {
    for (auto j = i + 1; j < positions.size(); ++j) {
      d(i, j) = d(j, i) = comb_distance(c, positions[i], positions[j]);
    }
  }
  return d;
}

void validate_ultrametric(const Distance_matrix& d, double rel_tol) {
  auto n = d.size();
  for (auto i = std::size_t{0}; i < n; ++i) {
    if (d(i, i) != 0.0) throw Validation_error{"distance matrix must have a zero diagonal"};
    for (auto j = i + 1; j < n; ++j) {
      auto a = d(i, j);
      auto b = d(j, i);
      if (!(std::isfinite(a) && a >= 0.0)) throw Validation_error{"distances must be finite and nonnegative"};
      if (std::abs(a - b) > rel_tol * std::max(a, b)) throw Validation_error{"distance matrix is not symmetric"};
    }
  }
  for (auto x = std::size_t{0}; x < n; ++x) {
    for (auto y = std::size_t{0}; y < n; ++y) {
      for (auto z = x + 1; z < n; ++z) {
        auto bound = std::max(d(x, y), d(y, z));
        if (d(x, z) > bound * (1.0 + rel_tol)) {
          throw Validation_error{"not ultrametric: d(" + std::to_string(x) + "," + std::to_string(z) +
                                 ") exceeds max(d(" + std::to_string(x) + "," + std::to_string(y) + "), d(" +
                                 std::to_string(y) + "," + std::to_string(z) + "))"};
        }
      }
    }
  }
}

namespace {

struct Union_find {
  explicit Union_find(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  auto find(std::size_t x) -> std::size_t {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
  std::vector<std::size_t> parent;
};

class Ultrametric_builder {
 public:
  Ultrametric_builder(const Distance_matrix& d, std::vector<double> point_mass, bool visibility)
      : d_{d}, point_mass_{std::move(point_mass)}, visibility_{visibility}, placement_(d.size()) {}

  void place(const std::vector<std::size_t>& ball, double start, double length) {
    auto diameter = 0.0;
    for (auto i : ball) {
      for (auto j : ball) diameter = std::max(diameter, d_(i, j));
    }
    if (ball.size() == 1 || diameter == 0.0) {
      for (auto i : ball) placement_[i] = {start, start + length};
      return;
    }

    // Sub-balls: classes of d < D, up to the validation tolerance.
    auto cut = diameter * (1.0 - k_rel_tol);
    auto uf = Union_find{ball.size()};
    for (auto a = std::size_t{0}; a < ball.size(); ++a) {
      for (auto b = a + 1; b < ball.size(); ++b) {
        if (d_(ball[a], ball[b]) < cut) uf.unite(a, b);
      }
    }
    auto groups = std::vector<std::vector<std::size_t>>{};
    auto group_of_root = std::vector<std::size_t>(ball.size(), SIZE_MAX);
    for (auto a = std::size_t{0}; a < ball.size(); ++a) {
      auto r = uf.find(a);
      if (group_of_root[r] == SIZE_MAX) {
        group_of_root[r] = groups.size();
        groups.emplace_back();
      }
      groups[group_of_root[r]].push_back(ball[a]);
    }
    if (groups.size() < 2) throw Validation_error{"ball does not fragment below its diameter"};
    // `ball` is sorted, so groups are already ordered by smallest index.

    auto offset = start;
    for (auto g = std::size_t{0}; g < groups.size(); ++g) {
      auto share = visibility_ ? length / static_cast<double>(groups.size()) : mass_of(groups[g]);
      if (g + 1 == groups.size()) share = start + length - offset;
      if (g > 0) teeth_.push_back({offset, diameter / 2.0});
      place(groups[g], offset, share);
      offset += share;
    }
  }

  auto take_teeth() -> std::vector<Tooth> {
    std::sort(teeth_.begin(), teeth_.end(), [](const Tooth& a, const Tooth& b) { return a.position < b.position; });
    return std::move(teeth_);
  }
  auto take_placement() -> std::vector<std::pair<double, double>> { return std::move(placement_); }

  static constexpr double k_rel_tol = 1e-9;

 private:
  auto mass_of(const std::vector<std::size_t>& group) const -> double {
    auto m = 0.0;
    for (auto i : group) m += point_mass_[i];
    return m;
  }

  const Distance_matrix& d_;
  std::vector<double> point_mass_;
  bool visibility_;
  std::vector<std::pair<double, double>> placement_;
  std::vector<Tooth> teeth_;
};

}  // namespace

auto comb_from_ultrametric(const Distance_matrix& d, std::optional<std::span<const double>> masses,
                           std::optional<double> origin_height) -> Ultrametric_comb {
  auto n = d.size();
  if (n == 0) throw Validation_error{"distance matrix is empty"};
  validate_ultrametric(d, Ultrametric_builder::k_rel_tol);

  auto point_mass = std::vector<double>(n, 0.0);
  auto total = 1.0;
  if (masses) {
    if (masses->size() != n) throw Validation_error{"one mass per point is required"};
    total = 0.0;
    for (auto i = std::size_t{0}; i < n; ++i) {
      auto m = (*masses)[i];
      if (!(std::isfinite(m) && m > 0.0)) throw Validation_error{"masses must be positive"};
      point_mass[i] = m;
      total += m;
    }
  }

  auto builder = Ultrametric_builder{d, std::move(point_mass), !masses.has_value()};
  auto all = std::vector<std::size_t>(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  builder.place(all, 0.0, total);

  auto teeth = builder.take_teeth();
  auto top = 0.0;
  for (const auto& t : teeth) top = std::max(top, t.height);
  auto origin = origin_height.value_or(top > 0.0 ? 2.0 * top : 1.0);
  return Ultrametric_comb{Comb{total, origin, std::move(teeth)}, builder.take_placement()};
}

auto comb_to_tree(const Comb& c) -> Tree {
  auto teeth = c.teeth();
  auto n = teeth.size();
  auto tree = Tree{};
  auto top = c.origin_height();
  if (n == 0) {
    tree.add_node(k_no_node, top, "0");
    return tree;
  }

  // Max-Cartesian tree over tooth heights; with ties the later tooth
  // becomes a child of the earlier one and the zero edge is collapsed below.
  auto left = std::vector<std::ptrdiff_t>(n, -1);
  auto right = std::vector<std::ptrdiff_t>(n, -1);
  auto stack = std::vector<std::ptrdiff_t>{};
  for (auto i = std::ptrdiff_t{0}; i < static_cast<std::ptrdiff_t>(n); ++i) {
    auto last = std::ptrdiff_t{-1};
    while (!stack.empty() && teeth[static_cast<std::size_t>(stack.back())].height < teeth[static_cast<std::size_t>(i)].height) {
      last = stack.back();
      stack.pop_back();
    }
    left[static_cast<std::size_t>(i)] = last;
    if (!stack.empty()) right[static_cast<std::size_t>(stack.back())] = i;
    stack.push_back(i);
  }

  // Emit nodes top-down; a missing child slot of tooth i is leaf i (left)
  // or leaf i+1 (right).
  struct Item {
    bool is_leaf;
    std::size_t index;
    Node_index parent;
  };
  auto work = std::vector<Item>{{false, static_cast<std::size_t>(stack.front()), k_no_node}};
  while (!work.empty()) {
    auto item = work.back();
    work.pop_back();
    if (item.is_leaf) {
      tree.add_node(item.parent, top, std::to_string(item.index));
      continue;
    }
    auto i = item.index;
    auto id = tree.add_node(item.parent, top - teeth[i].height);
    auto r = right[i] < 0 ? Item{true, i + 1, id} : Item{false, static_cast<std::size_t>(right[i]), id};
    auto l = left[i] < 0 ? Item{true, i, id} : Item{false, static_cast<std::size_t>(left[i]), id};
    work.push_back(r);
    work.push_back(l);
  }
  tree.collapse_zero_edges();
  return tree;
}

}  // namespace ultracomb
