#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ultracomb/tree.h"

namespace ultracomb {

struct Tooth {
  double position = 0.0;
  double height = 0.0;

  friend auto operator==(const Tooth&, const Tooth&) -> bool = default;
};

// A comb on [0, a]: finitely many teeth with strictly increasing positions
// in (0, a), plus the origin branch of height T above every tooth.  Teeth
// lower than `truncation` are absent by construction, so distances are
// only resolved above 2 * truncation.
//
// The inter-tooth intervals are numbered 0..size(): interval k runs from
// the (k-1)-th tooth (or 0) to the k-th tooth (or a).
class Comb {
 public:
  Comb(double interval_length, double origin_height, std::vector<Tooth> teeth, double truncation = 0.0);

  auto interval_length() const -> double { return interval_length_; }
  auto origin_height() const -> double { return origin_height_; }
  auto truncation() const -> double { return truncation_; }
  auto teeth() const -> std::span<const Tooth> { return teeth_; }
  auto size() const -> std::size_t { return teeth_.size(); }
  auto max_height() const -> double;

  auto interval_count() const -> std::size_t { return teeth_.size() + 1; }
  auto interval_start(std::size_t k) const -> double { return k == 0 ? 0.0 : teeth_[k - 1].position; }
  auto interval_end(std::size_t k) const -> double {
    return k == teeth_.size() ? interval_length_ : teeth_[k].position;
  }
  // Interval containing `position`; a position equal to a tooth belongs to
  // the interval on its right.
  auto interval_of(double position) const -> std::size_t;

  friend auto operator==(const Comb&, const Comb&) -> bool = default;

 private:
  double interval_length_;
  double origin_height_;
  std::vector<Tooth> teeth_;
  double truncation_;
};

enum class Face { left, right };

struct Boundary_point {
  double position = 0.0;
  Face face = Face::right;
};

struct Partition {
  // Blocks hold 0-based indices, each block sorted, blocks ordered by their
  // smallest element.
  std::vector<std::vector<std::size_t>> blocks;

  auto element_count() const -> std::size_t;
  // Every block of *this is contained in a block of `coarser`.
  auto refines(const Partition& coarser) const -> bool;
  void normalize();

  friend auto operator==(const Partition&, const Partition&) -> bool = default;
};

// 2 * max tooth height between p and q, where each face decides whether a
// tooth sitting exactly at its position is included (left face includes,
// right face excludes on the left end; the opposite on the right end).
auto comb_distance(const Comb& c, Boundary_point p, Boundary_point q) -> double;

// Interior points only (right faces).
auto comb_distance(const Comb& c, double s, double t) -> double;

// Blocks of the relation d <= r, computed from the sorted order: in a comb
// the distance of two points is the largest gap distance between the
// sorted neighbours lying between them.
auto ball_partition(const Comb& c, std::span<const Boundary_point> points, double r) -> Partition;
auto ball_partition(const Comb& c, std::span<const double> positions, double r) -> Partition;

// Dense square matrix, row-major.
class Distance_matrix {
 public:
  explicit Distance_matrix(std::size_t n) : n_{n}, data_(n * n, 0.0) {}
  auto size() const -> std::size_t { return n_; }
  auto operator()(std::size_t i, std::size_t j) -> double& { return data_[i * n_ + j]; }
  auto operator()(std::size_t i, std::size_t j) const -> double { return data_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::vector<double> data_;
};

auto pairwise_distances(const Comb& c, std::span<const double> positions) -> Distance_matrix;

// Checks symmetry, zero diagonal and the ultrametric inequality with
// relative tolerance `rel_tol`; throws Validation_error on failure.
void validate_ultrametric(const Distance_matrix& d, double rel_tol = 1e-9);

struct Ultrametric_comb {
  Comb comb;
  // placement[i] = [start, end) subinterval assigned to point i.
  std::vector<std::pair<double, double>> placement;
};

// Recursive ball fragmentation: each ball of diameter D becomes an interval
// whose sub-balls are laid out left to right (ordered by smallest index)
// and separated by teeth of height D/2.  Without masses, the visibility
// measure is used: total mass 1, split equally at every fragmentation.
// The origin branch defaults to twice the largest tooth (1 for a single
// point).
auto comb_from_ultrametric(const Distance_matrix& d,
                           std::optional<std::span<const double>> masses = std::nullopt,
                           std::optional<double> origin_height = std::nullopt) -> Ultrametric_comb;

// The tree tau_f(T): leaf k is interval k (labelled by k), each tooth is an
// internal node at depth T - height, tied heights merge into polytomies.
auto comb_to_tree(const Comb& c) -> Tree;

}  // namespace ultracomb
