#include "ultracomb/spectrum.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/special_functions/expint.hpp>

#include "ultracomb/error.h"
#include "ultracomb/intensity.h"
#include "ultracomb/parallel.h"
#include "ultracomb/samplers.h"

namespace ultracomb {

auto Sample_spectrum::sample_size() const -> std::size_t {
  auto n = std::size_t{0};
  for (auto k = std::size_t{0}; k < counts.size(); ++k) n += (k + 1) * counts[k];
  return n;
}

auto spectrum_of_partition(const Partition& p) -> Sample_spectrum {
  auto n = p.element_count();
  auto out = Sample_spectrum{std::vector<std::size_t>(n, 0)};
  for (const auto& b : p.blocks) {
    if (b.empty()) throw Validation_error{"partition has an empty block"};
    ++out.counts[b.size() - 1];
  }
  return out;
}

auto esf_probability(double theta, std::span<const std::size_t> counts) -> double {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw Validation_error{"theta must be positive and finite"};
  auto n = std::size_t{0};
  for (auto k = std::size_t{0}; k < counts.size(); ++k) n += (k + 1) * counts[k];
  if (n == 0) throw Validation_error{"allele counts describe an empty sample"};
  if (n != counts.size()) {
    throw Validation_error{"allele counts sum to n = " + std::to_string(n) + " but the vector has length " +
                           std::to_string(counts.size())};
  }
  auto log_p = std::lgamma(static_cast<double>(n) + 1.0);
  for (auto i = std::size_t{0}; i < n; ++i) log_p -= std::log(theta + static_cast<double>(i));
  for (auto k = std::size_t{1}; k <= n; ++k) {
    auto a = static_cast<double>(counts[k - 1]);
    if (a == 0.0) continue;
    log_p += a * std::log(theta / static_cast<double>(k)) - std::lgamma(a + 1.0);
  }
  return std::exp(log_p);
}

void for_each_partition(std::size_t n, const std::function<void(const std::vector<std::size_t>&)>& visit) {
  auto counts = std::vector<std::size_t>(n, 0);
  // Parts are chosen in nonincreasing order: fill(remaining, largest).
  auto fill = [&](auto& self, std::size_t remaining, std::size_t largest) -> void {
    if (remaining == 0) {
      visit(counts);
      return;
    }
    for (auto part = std::min(remaining, largest); part >= 1; --part) {
      ++counts[part - 1];
      self(self, remaining - part, part);
      --counts[part - 1];
    }
  };
  if (n > 0) fill(fill, n, n);
}

auto expected_sample_spectrum(double theta, std::size_t n, std::size_t k) -> double {
  if (n < 1 || k < 1 || k > n) throw Validation_error{"need 1 <= k <= n"};
  if (n > k_exact_spectrum_limit) {
    throw Validation_error{"exact spectrum is limited to n <= " + std::to_string(k_exact_spectrum_limit) +
                           "; use the Monte Carlo estimate"};
  }
  auto total = 0.0;
  for_each_partition(n, [&](const std::vector<std::size_t>& a) {
    if (a[k - 1] > 0) total += static_cast<double>(a[k - 1]) * esf_probability(theta, a);
  });
  return total;
}

auto default_kingman_teeth(std::size_t n) -> std::size_t { return std::max<std::size_t>(500, 30 * n); }

auto kingman_allelic_partition(std::size_t n, double theta, std::size_t teeth, Random_source& rng) -> Partition {
  if (n < 1) throw Validation_error{"sample size must be at least 1"};
  auto comb = sample_kingman_comb(teeth == 0 ? default_kingman_teeth(n) : teeth, rng);
  auto mutations = scatter_mutations(comb, Mutation_measure::uniform(theta / 2.0), true, rng);
  auto positions = std::vector<double>(n);
  for (auto& x : positions) x = rng.uniform();
  return assign_alleles(comb, mutations, positions).partition;
}

auto simulate_sample_spectra(const Sample_spectrum_run& run) -> std::vector<Sample_spectrum> {
  if (!(run.theta > 0.0)) throw Validation_error{"theta must be positive"};
  if (run.reps < 1) throw Validation_error{"reps must be at least 1"};
  return run_replicates(run.reps, run.seed, run.jobs, [&](std::int64_t, Random_source& rng) {
    return spectrum_of_partition(kingman_allelic_partition(run.n, run.theta, run.teeth, rng));
  });
}

auto estimate_sample_spectrum(const Sample_spectrum_run& run, std::size_t k) -> Estimate {
  if (k < 1 || k > run.n) throw Validation_error{"need 1 <= k <= n"};
  auto spectra = simulate_sample_spectra(run);
  auto sum = 0.0;
  auto sum_sq = 0.0;
  for (const auto& s : spectra) {
    auto x = static_cast<double>(s.at(k));
    sum += x;
    sum_sq += x * x;
  }
  auto m = static_cast<double>(spectra.size());
  auto mean = sum / m;
  auto var = m > 1 ? (sum_sq - m * mean * mean) / (m - 1.0) : 0.0;
  return Estimate{mean, std::sqrt(std::max(var, 0.0) / m)};
}

auto Population_spectrum::tail_count(double q) const -> std::size_t {
  return static_cast<std::size_t>(std::count_if(atoms.begin(), atoms.end(), [q](double x) { return x >= q; }));
}

auto Population_spectrum::atom_count(double x) const -> std::size_t {
  return static_cast<std::size_t>(std::count(atoms.begin(), atoms.end(), x));
}

auto population_spectrum(const Comb& c, std::span<const Mutation> ms, Carrier_measure measure)
    -> Population_spectrum {
  auto clades = mutation_clades(c, ms);
  auto a = c.interval_length();
  auto order = std::vector<std::size_t>(clades.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const auto& p = clades[x];
    const auto& q = clades[y];
    if (p.start != q.start) return p.start < q.start;
    if (p.end != q.end) return p.end > q.end;
    return ms[p.mutation].depth > ms[q.mutation].depth;
  });

  // Maximal nested children of every clade, in left-to-right order.
  auto children = std::vector<std::vector<std::size_t>>(clades.size());
  auto stack = std::vector<std::size_t>{};
  for (auto i : order) {
    while (!stack.empty() && clades[stack.back()].end <= clades[i].start && clades[stack.back()].end != a) {
      stack.pop_back();
    }
    if (!stack.empty()) children[stack.back()].push_back(i);
    stack.push_back(i);
  }

  auto out = Population_spectrum{};
  for (auto i = std::size_t{0}; i < clades.size(); ++i) {
    const auto& k = clades[i];
    auto carrier = 0.0;
    if (measure == Carrier_measure::intervals) {
      auto count = k.interval_count();
      for (auto ch : children[i]) count -= clades[ch].interval_count();
      carrier = static_cast<double>(count);
    } else {
      auto cursor = k.start;
      for (auto ch : children[i]) {
        if (clades[ch].start > cursor) carrier += clades[ch].start - cursor;
        cursor = std::max(cursor, clades[ch].end);
      }
      if (k.end > cursor) carrier += k.end - cursor;
    }
    if (carrier > 0.0) out.atoms.push_back(carrier);
  }
  return out;
}

auto lambda_target(Lambda_model model, Lambda_mode mode, double theta, double q) -> double {
  if (!(theta > 0.0)) throw Validation_error{"theta must be positive"};
  if (model == Lambda_model::brownian) {
    if (mode == Lambda_mode::atom) throw Validation_error{"the Brownian spectrum is diffuse; use tail mode"};
    if (!(q > 0.0)) throw Validation_error{"q must be positive"};
    return theta * boost::math::expint(1, theta * q);
  }
  auto term = [theta](double k) { return theta / k * std::pow(1.0 + theta, -k); };
  if (mode == Lambda_mode::atom) {
    if (!(q >= 1.0) || q != std::floor(q)) throw Validation_error{"atoms of the critical spectrum sit at k = 1, 2, ..."};
    return term(q);
  }
  auto total = 0.0;
  for (auto k = std::max(1.0, std::ceil(q));; k += 1.0) {
    auto t = term(k);
    total += t;
    if (t < 1e-18 * total || k > 1e7) break;
  }
  return total;
}

auto normalized_tail_spectrum(const Tail_spectrum_run& run) -> std::vector<Tail_estimate> {
  if (run.q.empty()) throw Validation_error{"q grid is empty"};
  if (run.reps < 2) throw Validation_error{"need at least two replicates"};
  auto critical = run.model == Lambda_model::critical_bd;
  auto nu = critical ? critical_bd_intensity(1.0) : brownian_intensity(1.0);
  auto eps = critical ? 0.0 : run.eps;
  auto mu = Mutation_measure::uniform(run.theta);
  for (auto q : run.q) (void)lambda_target(run.model, run.mode, run.theta, q);

  struct Replicate {
    double size = 0.0;
    std::vector<double> counts;
  };
  auto replicates = run_replicates(run.reps, run.seed, run.jobs, [&](std::int64_t, Random_source& rng) {
    auto cpp = sample_cpp(nu, run.T, eps, rng);
    auto ms = scatter_mutations(cpp.comb, mu, true, rng);
    auto measure = critical ? Carrier_measure::intervals : Carrier_measure::length;
    auto spectrum = population_spectrum(cpp.comb, ms, measure);
    auto r = Replicate{};
    r.size = critical ? static_cast<double>(cpp.comb.interval_count()) : cpp.width;
    for (auto q : run.q) {
      r.counts.push_back(static_cast<double>(run.mode == Lambda_mode::atom ? spectrum.atom_count(q)
                                                                           : spectrum.tail_count(q)));
    }
    return r;
  });

  auto m = static_cast<double>(replicates.size());
  auto size_total = 0.0;
  for (const auto& r : replicates) size_total += r.size;
  auto mean_size = size_total / m;
  auto out = std::vector<Tail_estimate>{};
  for (auto j = std::size_t{0}; j < run.q.size(); ++j) {
    auto count_total = 0.0;
    for (const auto& r : replicates) count_total += r.counts[j];
    auto ratio = count_total / size_total;
    auto resid = 0.0;
    for (const auto& r : replicates) {
      auto e = r.counts[j] - ratio * r.size;
      resid += e * e;
    }
    auto se = std::sqrt(resid / (m * (m - 1.0))) / mean_size;
    out.push_back({run.q[j], ratio, se, lambda_target(run.model, run.mode, run.theta, run.q[j])});
  }
  return out;
}

auto gem_ranked_draw(double theta, std::size_t depth, Random_source& rng) -> std::vector<double> {
  if (!(theta > 0.0)) throw Validation_error{"theta must be positive"};
  if (depth < 1) throw Validation_error{"depth must be at least 1"};
  auto out = std::vector<double>(depth);
  auto rest = 1.0;
  for (auto& p : out) {
    auto z = rng.beta_one(theta);
    p = z * rest;
    rest *= 1.0 - z;
  }
  std::sort(out.begin(), out.end(), std::greater<>{});
  return out;
}

auto gem_ranked_oracle(double theta, std::size_t depth, std::int64_t reps, std::uint64_t seed, int jobs)
    -> std::vector<std::vector<double>> {
  return run_replicates(reps, seed, jobs,
                        [&](std::int64_t, Random_source& rng) { return gem_ranked_draw(theta, depth, rng); });
}

auto largest_block_fraction(const Partition& p) -> double {
  auto n = p.element_count();
  if (n == 0) throw Validation_error{"empty partition"};
  auto largest = std::size_t{0};
  for (const auto& b : p.blocks) largest = std::max(largest, b.size());
  return static_cast<double>(largest) / static_cast<double>(n);
}

}  // namespace ultracomb
