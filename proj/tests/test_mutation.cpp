#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "support/oracles.h"
#include "ultracomb/error.h"
#include "ultracomb/intensity.h"
#include "ultracomb/mutation.h"
#include "ultracomb/parallel.h"
#include "ultracomb/random.h"

using namespace ultracomb;

namespace {

auto example_comb() -> Comb { return Comb{1.0, 4.0, {{0.2, 3.0}, {0.5, 1.0}, {0.8, 2.0}}}; }

auto random_comb(Random_source& rng, std::size_t max_teeth) -> Comb {
  auto n = static_cast<std::size_t>(rng.uniform() * static_cast<double>(max_teeth + 1));
  auto teeth = std::vector<Tooth>{};
  for (auto k = std::size_t{1}; k <= n; ++k) teeth.push_back({static_cast<double>(k), rng.uniform(0.1, 4.0)});
  return Comb{static_cast<double>(n + 1), 4.5, teeth};
}

auto random_mutations(const Comb& c, Random_source& rng, std::size_t max_count) -> std::vector<Mutation> {
  auto count = static_cast<std::size_t>(rng.uniform() * static_cast<double>(max_count + 1));
  auto ms = std::vector<Mutation>{};
  for (auto k = std::size_t{0}; k < count; ++k) {
    auto branch = static_cast<std::ptrdiff_t>(rng.uniform() * static_cast<double>(c.size() + 1)) - 1;
    auto h = branch < 0 ? c.origin_height() : c.teeth()[static_cast<std::size_t>(branch)].height;
    ms.push_back({branch, rng.uniform(0.0, h)});
  }
  std::sort(ms.begin(), ms.end(), [](const Mutation& a, const Mutation& b) {
    return a.branch != b.branch ? a.branch < b.branch : a.depth < b.depth;
  });
  return ms;
}

}  // namespace

TEST_CASE("zero measure scatters nothing") {
  auto rng = Random_source{61};
  CHECK(scatter_mutations(example_comb(), Mutation_measure::zero(), true, rng).empty());
}

TEST_CASE("mutation counts are Poisson with the branch masses") {
  auto c = Comb{1.0, 4.0, {{0.2, 1.0}, {0.5, 2.0}, {0.8, 3.0}}};
  auto mu = Mutation_measure::uniform(1.0);
  auto counts = run_replicates(100000, 62, 1, [&](std::int64_t, Random_source& rng) {
    return scatter_mutations(c, mu, true, rng).size();
  });
  auto mean = 0.0;
  for (auto n : counts) mean += static_cast<double>(n);
  mean /= static_cast<double>(counts.size());
  CHECK(mean == doctest::Approx(10.0).epsilon(0.03));

  auto rng = Random_source{63};
  auto depths = std::vector<double>{};
  while (depths.size() < 5000) {
    for (const auto& m : scatter_mutations(c, mu, false, rng)) {
      if (m.branch == 1) depths.push_back(m.depth);
    }
  }
  CHECK(oracle::ks_one_sample(depths, [](double x) { return x / 2.0; }) > 0.01);
}

TEST_CASE("scattered mutations are valid and respect options") {
  auto rng = Random_source{64};
  auto c = example_comb();
  for (auto rep = 0; rep < 200; ++rep) {
    auto ms = scatter_mutations(c, Mutation_measure::uniform(2.0), rep % 2 == 0, rng, 0.5);
    REQUIRE_NOTHROW(validate_mutations(c, ms));
    for (const auto& m : ms) {
      REQUIRE(m.depth > 0.5);
      if (rep % 2 == 1) REQUIRE(m.branch != k_origin_branch);
    }
  }
  auto infinite = mutation_rate_pushforward(Mutation_measure::uniform(1.0), Time_change::exponential(1.0));
  CHECK_THROWS_AS(scatter_mutations(Comb{1.0, 0.9, {}}, infinite, true, rng), Validation_error);
}

TEST_CASE("mutation validation") {
  auto c = example_comb();
  auto ok = std::vector<Mutation>{{k_origin_branch, 3.5}, {0, 1.0}, {0, 2.0}, {2, 0.5}};
  CHECK_NOTHROW(validate_mutations(c, ok));
  auto too_deep = std::vector<Mutation>{{1, 1.5}};
  CHECK_THROWS_AS(validate_mutations(c, too_deep), Validation_error);
  auto unsorted = std::vector<Mutation>{{0, 2.0}, {0, 1.0}};
  CHECK_THROWS_AS(validate_mutations(c, unsorted), Validation_error);
  auto repeated = std::vector<Mutation>{{0, 1.0}, {0, 1.0}};
  CHECK_THROWS_AS(validate_mutations(c, repeated), Validation_error);
  auto no_branch = std::vector<Mutation>{{7, 0.1}};
  CHECK_THROWS_AS(validate_mutations(c, no_branch), Validation_error);
}

TEST_CASE("clade examples") {
  auto c = example_comb();
  auto clade = mutation_clade(c, {1, 0.7});
  CHECK(clade.start == 0.5);
  CHECK(clade.end == 0.8);
  CHECK(clade.measure() == doctest::Approx(0.3));
  CHECK(clade.first_interval == 2);
  CHECK(clade.end_interval == 3);
  auto whole = mutation_clade(c, {k_origin_branch, 3.5});
  CHECK(whole.start == 0.0);
  CHECK(whole.end == 1.0);
  auto low_origin = mutation_clade(c, {k_origin_branch, 2.5});
  CHECK(low_origin.end == 0.2);
  CHECK(mutation_clade(c, {0, 2.5}).end == 1.0);
  CHECK(mutation_clade(c, {0, 1.5}).end == 0.8);
}

TEST_CASE("clades form a laminar family") {
  auto rng = Random_source{65};
  for (auto rep = 0; rep < 500; ++rep) {
    auto c = random_comb(rng, 10);
    auto ms = random_mutations(c, rng, 10);
    auto clades = mutation_clades(c, ms);
    for (const auto& x : clades) {
      REQUIRE(x.measure() > 0.0);
      for (const auto& y : clades) {
        auto disjoint = x.end <= y.start || y.end <= x.start;
        auto nested = (x.start <= y.start && y.end <= x.end) || (y.start <= x.start && x.end <= y.end);
        REQUIRE((disjoint || nested));
      }
    }
  }
}

TEST_CASE("allelic assignment simple cases") {
  auto c = example_comb();
  auto xs = std::vector<double>{0.1, 0.3, 0.6, 0.9};
  auto none = assign_alleles(c, std::vector<Mutation>{}, xs);
  CHECK(none.partition == Partition{{{0, 1, 2, 3}}});
  for (auto a : none.allele) CHECK(a == k_clonal);
  auto top = std::vector<Mutation>{{k_origin_branch, 3.5}};
  auto all = assign_alleles(c, top, xs);
  CHECK(all.partition.blocks.size() == 1);
  for (auto a : all.allele) CHECK(a == 0);
  // Outer clade [0.2, 1) and inner clade [0.5, 0.8).
  auto nested = std::vector<Mutation>{{0, 2.5}, {1, 0.7}};
  auto r = assign_alleles(c, nested, xs);
  CHECK(r.allele == std::vector<std::ptrdiff_t>{k_clonal, 0, 1, 0});
  CHECK(r.partition == Partition{{{0}, {1, 3}, {2}}});
}

TEST_CASE("allelic assignment agrees with the lineage walk") {
  auto rng = Random_source{66};
  for (auto rep = 0; rep < 1000; ++rep) {
    auto c = random_comb(rng, 10);
    auto ms = random_mutations(c, rng, 10);
    auto xs = std::vector<double>(12);
    for (auto& x : xs) x = rng.uniform(0.0, c.interval_length());
    auto r = assign_alleles(c, ms, xs);
    REQUIRE(r.partition.element_count() == xs.size());
    for (auto i = std::size_t{0}; i < xs.size(); ++i) {
      REQUIRE(r.allele[i] == oracle::lineage_walk_allele(c, ms, xs[i]));
    }
    for (const auto& block : r.partition.blocks) {
      for (auto i : block) REQUIRE(r.allele[i] == r.allele[block.front()]);
    }
  }
}

TEST_CASE("clonal set examples") {
  auto c = example_comb();
  auto all = clonal_set(c, std::vector<Mutation>{});
  CHECK(all.pieces == std::vector<std::pair<double, double>>{{0.0, 1.0}});
  CHECK(all.contains(1.0));
  auto one = clonal_set(c, std::vector<Mutation>{{1, 0.7}});
  CHECK(one.pieces == std::vector<std::pair<double, double>>{{0.0, 0.5}, {0.8, 1.0}});
  CHECK(one.measure() == doctest::Approx(0.7));
  CHECK(!one.contains(0.6));
  CHECK(one.contains(0.8));
}

TEST_CASE("clonal set matches the clonal labels and shrinks with mutations") {
  auto rng = Random_source{67};
  auto grid = std::vector<double>{};
  for (auto rep = 0; rep < 300; ++rep) {
    auto c = random_comb(rng, 10);
    auto ms = random_mutations(c, rng, 8);
    grid.clear();
    for (auto i = 0; i < 1000; ++i) grid.push_back(c.interval_length() * (i + 0.5) / 1000.0);
    auto set = clonal_set(c, ms);
    auto labels = assign_alleles(c, ms, grid);
    for (auto i = std::size_t{0}; i < grid.size(); ++i) {
      REQUIRE(set.contains(grid[i]) == (labels.allele[i] == k_clonal));
    }
    auto more = ms;
    auto extra = random_mutations(c, rng, 3);
    more.insert(more.end(), extra.begin(), extra.end());
    std::sort(more.begin(), more.end(), [](const Mutation& a, const Mutation& b) {
      return a.branch != b.branch ? a.branch < b.branch : a.depth < b.depth;
    });
    auto smaller = clonal_set(c, more);
    for (auto x : grid) {
      if (smaller.contains(x)) REQUIRE(set.contains(x));
    }
  }
}

TEST_CASE("Laplace exponent against independent quadrature") {
  auto nu = critical_bd_intensity();
  auto mu = Mutation_measure::uniform(1.0);
  auto inv_phi = 1.0 / clonal_laplace_exponent(nu, mu, 1.0);
  auto closed = 1.0 - std::exp(2.0) * oracle::exponential_integral_e1(2.0);
  auto direct = oracle::simpson([](double x) { return std::exp(-x) * (1.0 + x) / (2.0 + x); }, 0.0, 60.0, 200000);
  CHECK(closed == doctest::Approx(direct).epsilon(1e-10));
  CHECK(inv_phi == doctest::Approx(closed).epsilon(1e-8));
  CHECK(1.0 / inv_phi == doctest::Approx(1.5657).epsilon(1e-4));
  auto big = 1e6;
  CHECK(std::abs(big / clonal_laplace_exponent(nu, mu, big) - 1.0) < 1e-3);
}

TEST_CASE("scaling the mutation measure") {
  auto nu = critical_bd_intensity();
  for (auto scale : {0.5, 3.0}) {
    auto direct = oracle::simpson(
        [scale](double x) { return scale * std::exp(-scale * x) / (2.0 + 1.0 / (1.0 + x)); }, 0.0, 80.0 / scale,
        200000);
    auto phi = clonal_laplace_exponent(nu, Mutation_measure::uniform(scale), 2.0);
    CHECK(1.0 / phi == doctest::Approx(direct).epsilon(1e-8));
  }
  CHECK_THROWS_AS(clonal_laplace_exponent(nu, Mutation_measure::zero(), 1.0), Numeric_error);
  CHECK_THROWS_AS(clonal_laplace_exponent(nu, Mutation_measure::uniform(1.0), -1.0), Validation_error);
}

TEST_CASE("clonal interval probability against quadrature") {
  auto nu = critical_bd_intensity();
  auto theta = 1.0;
  for (auto [T, eps, t] : {std::tuple{10.0, 0.0, 1.0}, std::tuple{5.0, 0.1, 2.0}}) {
    auto integral = oracle::simpson([theta](double x) { return -std::expm1(-theta * x) / ((1.0 + x) * (1.0 + x)); },
                                    eps, T, 200000);
    auto p = clonal_interval_probability(nu, Mutation_measure::uniform(theta), T, eps, t);
    CHECK(p == doctest::Approx(std::exp(-t * integral)).epsilon(1e-8));
  }
}
