#pragma once

#include <cstdint>
#include <optional>

#include "ultracomb/comb.h"
#include "ultracomb/intensity.h"
#include "ultracomb/random.h"
#include "ultracomb/tree.h"

namespace ultracomb {

struct Cpp_sample {
  Comb comb;
  double width = 0.0;
  // Height of the atom that killed the process; empty when the model says
  // nothing about heights above T.
  std::optional<double> killing_height;
};

// Kingman comb on [0, 1] with n teeth at i.i.d. uniform positions.  Tooth
// heights are tau_j = sum_{k=j+1}^{n+1} e_k + G with e_k ~ Exp(k(k-1)/2)
// and G a Gamma variable matching the mean 2/(n+1) and the variance of the
// neglected terms.  Origin height tau_1 + 1.
auto sample_kingman_comb(std::size_t n_teeth, Random_source& rng) -> Comb;

// CPP of height T with teeth below eps dropped: width D ~ Exp(nu_bar(T)),
// Poisson(D (nu_bar(eps) - nu_bar(T))) teeth at uniform positions, heights
// drawn by inverting the tail.
auto sample_cpp(const Intensity_model& m, double T, double eps, Random_source& rng) -> Cpp_sample;

// Teeth at j / p^depth, j = 1 .. p^depth - 1, with height p^{-n} where n is
// the level of the p-adic rational.  Interval [0, 1], origin height 1.
auto padic_comb(int p, int depth) -> Comb;

// Largest number of teeth padic_comb will build.
inline constexpr std::uint64_t k_padic_max_teeth = std::uint64_t{1} << 24;

struct Splitting_options {
  std::size_t max_retries = 10000;
  std::size_t max_individuals = 5'000'000;
};

// Genealogy of a binary branching population started by one individual at
// time 0: births at rate b during each lifetime, stopped at time T and
// conditioned on at least one individual alive at T.  Node depth is forward
// time.  Each individual is a chain of nodes, one per birth, ending in a
// leaf labelled by the individual's index; at a birth node the parent's
// continuation precedes the child, so the planar order of leaves is the
// order in which the jumping contour visits the tips.
auto sample_splitting_tree(double b, const Lifetime& lifetime, double T, Random_source& rng,
                           Splitting_options options = {}) -> Tree;

// Comb of the individuals alive at T (leaves at depth T) in planar order:
// unit spacing, tooth k = T - depth of the common ancestor of survivors k-1
// and k.  Origin height T.
auto reduce_population_tree(const Tree& tree, double T) -> Comb;

// Zoom onto [0, eps]: keeps teeth with position < eps and maps
// (x, h) -> (x / eps, h / eps).
auto rescale_comb(const Comb& c, double eps) -> Comb;

// Inverse map (x, h) -> (x eps, h eps) of rescale_comb on the kept part.
auto unscale_comb(const Comb& c, double eps) -> Comb;

}  // namespace ultracomb
