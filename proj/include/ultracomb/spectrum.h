#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ultracomb/comb.h"
#include "ultracomb/mutation.h"
#include "ultracomb/random.h"

namespace ultracomb {

// counts[k-1] = A(k), the number of blocks with k elements.
struct Sample_spectrum {
  std::vector<std::size_t> counts;

  auto sample_size() const -> std::size_t;
  auto at(std::size_t k) const -> std::size_t { return k >= 1 && k <= counts.size() ? counts[k - 1] : 0; }
  friend auto operator==(const Sample_spectrum&, const Sample_spectrum&) -> bool = default;
};

auto spectrum_of_partition(const Partition& p) -> Sample_spectrum;

// Ewens sampling formula; counts[k-1] = a_k with sum k a_k = n.
auto esf_probability(double theta, std::span<const std::size_t> counts) -> double;

// Calls visit(counts) for every integer partition of n, in count form.
void for_each_partition(std::size_t n, const std::function<void(const std::vector<std::size_t>&)>& visit);

inline constexpr std::size_t k_exact_spectrum_limit = 12;

// E[A_n(k)] by summing the ESF over all partitions of n (n <= 12).
auto expected_sample_spectrum(double theta, std::size_t n, std::size_t k) -> double;

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

// Allelic partition of n uniform points on a Kingman comb.  theta is the
// ESF parameter: lineages of the comb coalesce pairwise at rate 1, so
// mutations fall at rate theta/2 per unit depth.
auto kingman_allelic_partition(std::size_t n, double theta, std::size_t teeth, Random_source& rng) -> Partition;

// Teeth used for an n-sample when the caller does not choose: enough that
// two sample points rarely share an inter-tooth interval.
auto default_kingman_teeth(std::size_t n) -> std::size_t;

struct Sample_spectrum_run {
  std::size_t n = 0;
  double theta = 1.0;
  std::int64_t reps = 1;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::size_t teeth = 0;  // 0: default_kingman_teeth(n)
};

auto simulate_sample_spectra(const Sample_spectrum_run& run) -> std::vector<Sample_spectrum>;

// Monte Carlo mean of A_n(k) with its standard error.
auto estimate_sample_spectrum(const Sample_spectrum_run& run, std::size_t k) -> Estimate;

// Whole-population spectrum: one atom per allele with a nonempty carrier
// set, the clonal type excluded.  The carrier of a mutation is its clade
// minus the clades of the more recent mutations nested in it.
enum class Carrier_measure {
  length,     // Lebesgue measure of the carrier
  intervals,  // number of inter-tooth intervals, one per individual
};

struct Population_spectrum {
  std::vector<double> atoms;

  auto tail_count(double q) const -> std::size_t;
  auto atom_count(double x) const -> std::size_t;
};

auto population_spectrum(const Comb& c, std::span<const Mutation> ms,
                         Carrier_measure measure = Carrier_measure::length) -> Population_spectrum;

enum class Lambda_model { critical_bd, brownian };
enum class Lambda_mode { tail, atom };

struct Tail_spectrum_run {
  Lambda_model model = Lambda_model::critical_bd;
  Lambda_mode mode = Lambda_mode::tail;
  double theta = 1.0;
  double T = 50.0;
  double eps = 1e-3;  // brownian truncation; the critical case uses 0
  std::vector<double> q;
  std::int64_t reps = 1000;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct Tail_estimate {
  double q = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  double target = 0.0;
};

// Limit Lambda([q, inf)) (tail) or Lambda({q}) (atom, critical case only).
// Critical birth-death: Lambda({k}) = (theta/k)(1+theta)^{-k}; Brownian CPP
// with intensity dx/x^2: Lambda(dx) = (theta/x) e^{-theta x} dx.
auto lambda_target(Lambda_model model, Lambda_mode mode, double theta, double q) -> double;

// Ratio estimates sum_r A_T(q) / sum_r a(T) over CPP replicates, with a
// delta-method standard error.  The critical case counts individuals on
// a unit-spaced comb; the Brownian case measures carrier lengths.
auto normalized_tail_spectrum(const Tail_spectrum_run& run) -> std::vector<Tail_estimate>;

// Stick-breaking P_k = Z_k prod_{i<k}(1 - Z_i), Z ~ Beta(1, theta), for
// k <= depth, sorted in decreasing order.
auto gem_ranked_draw(double theta, std::size_t depth, Random_source& rng) -> std::vector<double>;
auto gem_ranked_oracle(double theta, std::size_t depth, std::int64_t reps, std::uint64_t seed, int jobs = 1)
    -> std::vector<std::vector<double>>;

// Largest block size over the element count.
auto largest_block_fraction(const Partition& p) -> double;

}  // namespace ultracomb
