#include "ultracomb/mutation.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ultracomb/error.h"

namespace ultracomb {

namespace {

auto branch_height(const Comb& c, std::ptrdiff_t branch) -> double {
  if (branch == k_origin_branch) return c.origin_height();
  if (branch < 0 || static_cast<std::size_t>(branch) >= c.size()) {
    throw Validation_error{"mutation branch " + std::to_string(branch) + " does not exist"};
  }
  return c.teeth()[static_cast<std::size_t>(branch)].height;
}

auto mutation_less(const Mutation& a, const Mutation& b) -> bool {
  return a.branch != b.branch ? a.branch < b.branch : a.depth < b.depth;
}

// next_greater[i] = first j > i with a strictly higher tooth, or size().
auto next_greater(const Comb& c) -> std::vector<std::size_t> {
  auto teeth = c.teeth();
  auto out = std::vector<std::size_t>(teeth.size(), teeth.size());
  auto stack = std::vector<std::size_t>{};
  for (auto i = std::size_t{0}; i < teeth.size(); ++i) {
    while (!stack.empty() && teeth[stack.back()].height < teeth[i].height) {
      out[stack.back()] = i;
      stack.pop_back();
    }
    stack.push_back(i);
  }
  return out;
}

auto clade_with(const Comb& c, const std::vector<std::size_t>& greater, std::size_t index, const Mutation& m)
    -> Clade_interval {
  auto teeth = c.teeth();
  auto n = teeth.size();
  auto j = m.branch == k_origin_branch ? std::size_t{0} : static_cast<std::size_t>(m.branch) + 1;
  while (j < n && teeth[j].height <= m.depth) j = greater[j];
  auto out = Clade_interval{};
  out.mutation = index;
  out.start = m.branch == k_origin_branch ? 0.0 : teeth[static_cast<std::size_t>(m.branch)].position;
  out.first_interval = m.branch == k_origin_branch ? 0 : static_cast<std::size_t>(m.branch) + 1;
  out.end = j < n ? teeth[j].position : c.interval_length();
  out.end_interval = j + 1;
  return out;
}

// Clade indices with every clade after the clades containing it; equal
// intervals put the deeper (older) mutation first.
auto laminar_order(const std::vector<Clade_interval>& clades, std::span<const Mutation> ms) -> std::vector<std::size_t> {
  auto order = std::vector<std::size_t>(clades.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = clades[a];
    const auto& y = clades[b];
    if (x.start != y.start) return x.start < y.start;
    if (x.end != y.end) return x.end > y.end;
    return ms[x.mutation].depth > ms[y.mutation].depth;
  });
  return order;
}

}  // namespace

void validate_mutations(const Comb& c, std::span<const Mutation> ms) {
  for (auto i = std::size_t{0}; i < ms.size(); ++i) {
    auto h = branch_height(c, ms[i].branch);
    if (!(ms[i].depth > 0.0 && ms[i].depth < h)) {
      throw Validation_error{"mutation " + std::to_string(i) + ": depth must lie in (0, branch height)"};
    }
    if (i > 0 && !mutation_less(ms[i - 1], ms[i])) {
      throw Validation_error{"mutation " + std::to_string(i) + ": not sorted by (branch, depth) or repeated"};
    }
  }
}

auto scatter_mutations(const Comb& c, const Mutation_measure& mu, bool include_origin, Random_source& rng,
                       double min_depth) -> std::vector<Mutation> {
  auto out = std::vector<Mutation>{};
  if (mu.is_zero()) return out;
  if (!(min_depth >= 0.0)) throw Validation_error{"min_depth must be nonnegative"};
  auto floor_level = mu.level(min_depth);
  auto depths = std::vector<double>{};
  auto scatter_on = [&](std::ptrdiff_t branch, double height) {
    if (!(height > min_depth)) return;
    auto mass = mu.mass(min_depth, height);
    if (!std::isfinite(mass)) {
      throw Validation_error{"mutation measure has infinite mass on a branch of height " + std::to_string(height) +
                             "; set a positive minimum depth"};
    }
    auto count = rng.poisson(mass);
    depths.clear();
    for (auto k = std::uint64_t{0}; k < count; ++k) {
      auto y = 0.0;
      for (auto attempt = 0;; ++attempt) {
        y = mu.level_inverse(floor_level + rng.uniform() * mass);
        if (y > min_depth && y > 0.0 && y < height) break;
        if (attempt > 1000) throw Numeric_error{"mutation measure inverse returns depths outside the branch"};
      }
      depths.push_back(y);
    }
    std::sort(depths.begin(), depths.end());
    depths.erase(std::unique(depths.begin(), depths.end()), depths.end());
    for (auto y : depths) out.push_back({branch, y});
  };
  if (include_origin) scatter_on(k_origin_branch, c.origin_height());
  auto teeth = c.teeth();
  for (auto i = std::size_t{0}; i < teeth.size(); ++i) scatter_on(static_cast<std::ptrdiff_t>(i), teeth[i].height);
  return out;
}

auto mutation_clade(const Comb& c, const Mutation& m) -> Clade_interval {
  auto h = branch_height(c, m.branch);
  if (!(m.depth > 0.0 && m.depth < h)) throw Validation_error{"mutation depth must lie in (0, branch height)"};
  return clade_with(c, next_greater(c), 0, m);
}

auto mutation_clades(const Comb& c, std::span<const Mutation> ms) -> std::vector<Clade_interval> {
  validate_mutations(c, ms);
  auto greater = next_greater(c);
  auto out = std::vector<Clade_interval>{};
  out.reserve(ms.size());
  for (auto i = std::size_t{0}; i < ms.size(); ++i) out.push_back(clade_with(c, greater, i, ms[i]));
  return out;
}

auto assign_alleles(const Comb& c, std::span<const Mutation> ms, std::span<const double> positions)
    -> Allelic_assignment {
  auto a = c.interval_length();
  for (auto t : positions) {
    if (!(t >= 0.0 && t <= a)) throw Validation_error{"sample position outside [0, interval_length]"};
  }
  auto clades = mutation_clades(c, ms);
  auto order = laminar_order(clades, ms);
  // A clade reaching the right end also holds the end point itself.
  auto ends_before = [&](const Clade_interval& k, double t) { return k.end <= t && k.end != a; };

  auto samples = std::vector<std::size_t>(positions.size());
  std::iota(samples.begin(), samples.end(), std::size_t{0});
  std::stable_sort(samples.begin(), samples.end(), [&](auto x, auto y) { return positions[x] < positions[y]; });

  auto result = Allelic_assignment{};
  result.allele.assign(positions.size(), k_clonal);
  auto stack = std::vector<std::size_t>{};
  auto next = std::size_t{0};
  for (auto s : samples) {
    auto t = positions[s];
    while (next < order.size() && clades[order[next]].start <= t) {
      const auto& k = clades[order[next]];
      while (!stack.empty() && ends_before(clades[stack.back()], k.start)) stack.pop_back();
      stack.push_back(order[next]);
      ++next;
    }
    while (!stack.empty() && ends_before(clades[stack.back()], t)) stack.pop_back();
    if (!stack.empty()) result.allele[s] = static_cast<std::ptrdiff_t>(clades[stack.back()].mutation);
  }

  auto block_of = std::vector<std::ptrdiff_t>(ms.size() + 1, -1);
  for (auto i = std::size_t{0}; i < positions.size(); ++i) {
    auto label = static_cast<std::size_t>(result.allele[i] + 1);
    if (block_of[label] < 0) {
      block_of[label] = static_cast<std::ptrdiff_t>(result.partition.blocks.size());
      result.partition.blocks.emplace_back();
    }
    result.partition.blocks[static_cast<std::size_t>(block_of[label])].push_back(i);
  }
  result.partition.normalize();
  return result;
}

auto Clonal_set::contains(double t) const -> bool {
  for (const auto& [s, e] : pieces) {
    if (s <= t && (t < e || (t == e && e == interval_length))) return true;
  }
  return false;
}

auto Clonal_set::measure() const -> double {
  auto total = 0.0;
  for (const auto& [s, e] : pieces) total += e - s;
  return total;
}

auto clonal_set(const Comb& c, std::span<const Mutation> ms) -> Clonal_set {
  auto clades = mutation_clades(c, ms);
  auto order = laminar_order(clades, ms);
  auto out = Clonal_set{{}, c.interval_length()};
  auto covered_to = 0.0;
  for (auto i : order) {
    const auto& k = clades[i];
    if (k.end <= covered_to) continue;
    if (k.start > covered_to) out.pieces.push_back({covered_to, k.start});
    covered_to = k.end;
  }
  if (covered_to < c.interval_length()) out.pieces.push_back({covered_to, c.interval_length()});
  return out;
}

auto clonal_laplace_exponent(const Intensity_model& nu, const Mutation_measure& mu, double lambda) -> double {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Validation_error{"lambda must be positive and finite"};
  if (mu.is_zero()) throw Numeric_error{"zero mutation measure: 1/phi vanishes"};
  auto base = mu.level(0.0);
  if (!std::isfinite(base)) throw Validation_error{"mutation measure must have finite mass near 0"};
  auto top = mu.level(INFINITY);
  auto upper = std::isnan(top) ? INFINITY : top - base;
  auto integrand = [&](double u) {
    auto x = mu.level_inverse(base + u);
    auto tail = x <= 0.0 ? nu.tail(0.0) : nu.tail(x);
    return std::exp(-u) / (lambda + tail);
  };
  auto error = 0.0;
  auto value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, upper, 15, 1e-13, &error);
  if (!std::isfinite(value) || !(value > 0.0)) throw Numeric_error{"Laplace exponent integral is not finite"};
  if (error > 1e-9 * value) {
    throw Numeric_error{"Laplace exponent quadrature did not converge (error estimate " + std::to_string(error) + ")"};
  }
  return 1.0 / value;
}

auto clonal_interval_probability(const Intensity_model& nu, const Mutation_measure& mu, double T, double eps,
                                 double t) -> double {
  if (!(t >= 0.0)) throw Validation_error{"interval length t must be nonnegative"};
  if (!(eps >= 0.0 && eps < T)) throw Validation_error{"need 0 <= eps < T"};
  auto lo = nu.tail(T);
  auto hi = nu.tail(eps);
  if (!std::isfinite(hi)) throw Validation_error{"nu_bar(eps) is not finite; choose eps > 0"};
  auto integrand = [&](double v) { return -std::expm1(-mu.cumulative(nu.tail_inverse(v))); };
  auto error = 0.0;
  auto value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, lo, hi, 15, 1e-12, &error);
  if (!std::isfinite(value)) throw Numeric_error{"clonal interval integral is not finite"};
  return std::exp(-t * value);
}

}  // namespace ultracomb
