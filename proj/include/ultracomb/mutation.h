#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "ultracomb/comb.h"
#include "ultracomb/intensity.h"
#include "ultracomb/measure.h"
#include "ultracomb/random.h"

namespace ultracomb {

inline constexpr std::ptrdiff_t k_origin_branch = -1;

// A mutation on tooth `branch` (or on the origin branch) at distance
// `depth` from the boundary.
struct Mutation {
  std::ptrdiff_t branch = k_origin_branch;
  double depth = 0.0;

  friend auto operator==(const Mutation&, const Mutation&) -> bool = default;
};

// Sorted by (branch, depth), origin first.  Throws Validation_error on a
// depth outside (0, branch height) or a repeated (branch, depth).
void validate_mutations(const Comb& c, std::span<const Mutation> ms);

// Poisson mutations of intensity mu(dy) on every tooth (and the origin
// branch if asked), restricted to depths above min_depth.  Omitting the
// origin is the exact conditioning on a mutation-free origin branch.
auto scatter_mutations(const Comb& c, const Mutation_measure& mu, bool include_origin, Random_source& rng,
                       double min_depth = 0.0) -> std::vector<Mutation>;

// Descendants of a mutation: [position of its branch, first tooth to the
// right higher than its depth).  Interval indices refer to Comb's inter-tooth
// intervals and are half-open as well.
struct Clade_interval {
  std::size_t mutation = 0;
  double start = 0.0;
  double end = 0.0;
  std::size_t first_interval = 0;
  std::size_t end_interval = 0;

  auto measure() const -> double { return end - start; }
  auto interval_count() const -> std::size_t { return end_interval - first_interval; }
};

auto mutation_clade(const Comb& c, const Mutation& m) -> Clade_interval;
auto mutation_clades(const Comb& c, std::span<const Mutation> ms) -> std::vector<Clade_interval>;

inline constexpr std::ptrdiff_t k_clonal = -1;

struct Allelic_assignment {
  Partition partition;
  // allele[i]: index into the mutation list of the most recent mutation on
  // the lineage of sample i, or k_clonal.
  std::vector<std::ptrdiff_t> allele;
};

// Infinitely-many-alleles labelling of the sample positions.
auto assign_alleles(const Comb& c, std::span<const Mutation> ms, std::span<const double> positions)
    -> Allelic_assignment;

// Finite union of disjoint intervals [start, end), sorted; the right end
// of the comb interval belongs to the last piece when it reaches it.
struct Clonal_set {
  std::vector<std::pair<double, double>> pieces;
  double interval_length = 0.0;

  auto contains(double t) const -> bool;
  auto measure() const -> double;
};

auto clonal_set(const Comb& c, std::span<const Mutation> ms) -> Clonal_set;

// 1/phi(lambda) = int e^{-mu(x)} / (lambda + nu_bar(x)) mu(dx), computed in
// the variable u = mu([0, x]).  Requires mu([0, x]) finite for x > 0.
auto clonal_laplace_exponent(const Intensity_model& nu, const Mutation_measure& mu, double lambda) -> double;

// P([0, t] is clonal), origin excluded, for a CPP of height T truncated at
// eps: exp(-t int_[eps, T) (1 - e^{-mu([0, x])}) nu(dx)).  The integral is
// taken in the variable v = nu_bar(x).
auto clonal_interval_probability(const Intensity_model& nu, const Mutation_measure& mu, double T, double eps,
                                 double t) -> double;

}  // namespace ultracomb
