#include "ultracomb/coders.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "ultracomb/error.h"

namespace ultracomb {

namespace {
constexpr double k_consistency_tol = 1e-9;
}

Contour_function::Contour_function(std::vector<Contour_jump> jumps) {
  if (jumps.empty()) throw Validation_error{"contour needs at least one jump"};
  auto previous_time = -INFINITY;
  auto expected_before = 0.0;
  auto previous_after = 0.0;
  for (auto i = std::size_t{0}; i < jumps.size(); ++i) {
    const auto& j = jumps[i];
    auto where = "contour breakpoint " + std::to_string(i);
    if (!(std::isfinite(j.time) && std::isfinite(j.before) && std::isfinite(j.after))) {
      throw Validation_error{where + ": non-finite value"};
    }
    if (!(j.time > previous_time)) throw Validation_error{where + ": times must increase"};
    if (j.time < 0.0) throw Validation_error{where + ": negative time"};
    if (j.after < j.before) throw Validation_error{where + ": negative jump"};
    if (j.before < 0.0) throw Validation_error{where + ": negative value"};
    if (i > 0) {
      expected_before = previous_after - (j.time - previous_time);
      if (expected_before < -k_consistency_tol * std::max(1.0, previous_after)) {
        throw Validation_error{where + ": contour would reach 0 before this jump"};
      }
    }
    if (std::abs(j.before - expected_before) > k_consistency_tol * std::max(1.0, std::abs(previous_after))) {
      throw Validation_error{where + ": value before the jump does not match slope -1 descent"};
    }
    if (j.after > j.before) {
      jumps_.push_back(j);
      source_index_.push_back(i);
    }
    previous_time = j.time;
    previous_after = j.after;
  }
  if (jumps_.empty()) throw Validation_error{"contour has no positive jump"};
  support_end_ = jumps.back().time + jumps.back().after;
}

auto Contour_function::piece_of(double t) const -> std::ptrdiff_t {
  auto it = std::upper_bound(jumps_.begin(), jumps_.end(), t,
                             [](double x, const Contour_jump& j) { return x < j.time; });
  return (it - jumps_.begin()) - 1;
}

auto Contour_function::value(double t) const -> double {
  auto i = piece_of(t);
  if (i < 0 || t >= support_end_) return 0.0;
  const auto& j = jumps_[static_cast<std::size_t>(i)];
  return std::max(0.0, j.after - (t - j.time));
}

auto Contour_function::infimum(double s, double t) const -> double {
  if (t < s) std::swap(s, t);
  auto m = std::min(value(s), value(t));
  auto first = std::upper_bound(jumps_.begin(), jumps_.end(), s,
                                [](double x, const Contour_jump& j) { return x < j.time; });
  for (auto it = first; it != jumps_.end() && it->time <= t; ++it) m = std::min(m, it->before);
  return m;
}

auto Contour_function::distance(double s, double t) const -> double {
  return value(s) + value(t) - 2.0 * infimum(s, t);
}

Contour_tree::Contour_tree(const Contour_function& h) : h_{&h} {
  const auto& jumps = h.jumps();
  auto n = jumps.size();

  // parent[i] = segment whose span holds the bottom of segment i, or -1
  // when the bottom is the root point.
  auto parent = std::vector<std::ptrdiff_t>(n, -1);
  auto attach = std::vector<std::vector<double>>(n);
  for (auto i = std::size_t{0}; i < n; ++i) {
    attach[i].push_back(jumps[i].after);
    if (jumps[i].before == 0.0) continue;
    auto p = segment_holding(static_cast<std::ptrdiff_t>(i) - 1, jumps[i].before);
    if (p < 0) throw Validation_error{"contour jump " + std::to_string(i) + " starts below every earlier segment"};
    parent[i] = p;
    attach[static_cast<std::size_t>(p)].push_back(jumps[i].before);
  }

  auto root = tree_.add_node(k_no_node, 0.0);
  segment_nodes_.resize(n);
  for (auto i = std::size_t{0}; i < n; ++i) {
    auto& heights = attach[i];
    std::sort(heights.begin(), heights.end());
    heights.erase(std::unique(heights.begin(), heights.end()), heights.end());

    auto below = root;
    if (parent[i] >= 0) {
      const auto& on_parent = segment_nodes_[static_cast<std::size_t>(parent[i])];
      auto it = std::find_if(on_parent.begin(), on_parent.end(),
                             [&](const auto& e) { return e.first == jumps[i].before; });
      below = it->second;
    }
    for (auto y : heights) {
      auto label = y == jumps[i].after ? std::to_string(h.source_index(i)) : std::string{};
      below = tree_.add_node(below, y, std::move(label));
      segment_nodes_[i].push_back({y, below});
    }
  }
}

auto Contour_tree::segment_holding(std::ptrdiff_t last_jump, double height) const -> std::ptrdiff_t {
  const auto& jumps = h_->jumps();
  for (auto j = last_jump; j >= 0; --j) {
    const auto& s = jumps[static_cast<std::size_t>(j)];
    if (s.before < height && height <= s.after) return j;
  }
  return -1;
}

auto Contour_tree::locate(double t) const -> Edge_point {
  auto y = h_->value(t);
  if (y <= 0.0) return Edge_point{tree_.root(), 0.0};
  const auto& jumps = h_->jumps();
  auto last = std::upper_bound(jumps.begin(), jumps.end(), t,
                               [](double x, const Contour_jump& j) { return x < j.time; }) -
              jumps.begin() - 1;
  auto seg = segment_holding(last, y);
  if (seg < 0) throw Validation_error{"time does not map to a tree point"};
  const auto& nodes = segment_nodes_[static_cast<std::size_t>(seg)];
  auto it = std::lower_bound(nodes.begin(), nodes.end(), y,
                             [](const auto& e, double v) { return e.first < v; });
  return Edge_point{it->second, it->first - y};
}

auto tree_from_contour(const Contour_function& h) -> Tree { return Contour_tree{h}.tree(); }

auto level_visits(const Contour_function& h, double level) -> std::vector<double> {
  if (!(level > 0.0)) throw Validation_error{"level must be positive"};
  const auto& jumps = h.jumps();
  auto raw = std::vector<double>{};
  for (auto i = std::size_t{0}; i < jumps.size(); ++i) {
    auto end_value = i + 1 < jumps.size() ? jumps[i + 1].before : 0.0;
    if (end_value < level && level <= jumps[i].after) raw.push_back(jumps[i].time + (jumps[i].after - level));
  }
  auto visits = std::vector<double>{};
  for (auto t : raw) {
    if (!visits.empty() && h.infimum(visits.back(), t) >= level) continue;
    visits.push_back(t);
  }
  return visits;
}

auto sphere_comb_from_contour(const Contour_function& h, double level) -> Comb {
  auto visits = level_visits(h, level);
  if (visits.empty()) throw Empty_sphere_error{"contour never reaches level " + std::to_string(level)};
  auto teeth = std::vector<Tooth>{};
  for (auto k = std::size_t{1}; k < visits.size(); ++k) {
    auto depth = level - h.infimum(visits[k - 1], visits[k]);
    if (!(depth < level)) throw Validation_error{"contour returns to the root between two visits of the level"};
    teeth.push_back({static_cast<double>(k), depth});
  }
  return Comb{static_cast<double>(visits.size()), level, std::move(teeth)};
}

auto contour_from_comb(const Comb& c) -> Contour_function {
  auto top = c.origin_height();
  auto jumps = std::vector<Contour_jump>{{0.0, 0.0, top}};
  auto time = 0.0;
  for (const auto& t : c.teeth()) {
    time += t.height;
    jumps.push_back({time, top - t.height, top});
  }
  return Contour_function{std::move(jumps)};
}

}  // namespace ultracomb
