#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "support/oracles.h"
#include "ultracomb/comb.h"
#include "ultracomb/error.h"
#include "ultracomb/random.h"
#include "ultracomb/tree.h"

using namespace ultracomb;

namespace {

auto example_comb() -> Comb { return Comb{1.0, 4.0, {{0.2, 3.0}, {0.5, 1.0}, {0.8, 2.0}}}; }

auto random_comb(Random_source& rng, std::size_t max_teeth, bool integer_heights = false) -> Comb {
  auto n = static_cast<std::size_t>(rng.uniform() * static_cast<double>(max_teeth + 1));
  auto positions = std::vector<double>{};
  while (positions.size() < n) {
    auto x = rng.uniform();
    if (std::find(positions.begin(), positions.end(), x) == positions.end()) positions.push_back(x);
  }
  std::sort(positions.begin(), positions.end());
  auto teeth = std::vector<Tooth>{};
  for (auto x : positions) {
    auto h = integer_heights ? std::floor(rng.uniform(1.0, 6.0)) : rng.uniform(0.01, 5.0);
    teeth.push_back({x, h});
  }
  return Comb{1.0, 6.0, teeth};
}

auto uniform_points(Random_source& rng, std::size_t n) -> std::vector<double> {
  auto xs = std::vector<double>(n);
  for (auto& x : xs) x = rng.uniform();
  return xs;
}

}  // namespace

TEST_CASE("comb validation") {
  CHECK_THROWS_AS(Comb(1.0, 4.0, {{0.5, 1.0}, {0.5, 2.0}}), Validation_error);
  CHECK_THROWS_AS(Comb(1.0, 4.0, {{0.6, 1.0}, {0.5, 2.0}}), Validation_error);
  CHECK_THROWS_AS(Comb(1.0, 2.0, {{0.5, 2.0}}), Validation_error);
  CHECK_THROWS_AS(Comb(1.0, 2.0, {{0.5, 0.0}}), Validation_error);
  CHECK_THROWS_AS(Comb(1.0, 2.0, {{1.0, 1.0}}), Validation_error);
  CHECK_THROWS_AS(Comb(0.0, 2.0, {}), Validation_error);
  CHECK_NOTHROW(Comb(1.0, 2.0, {}));
}

TEST_CASE("interval bookkeeping") {
  auto c = example_comb();
  CHECK(c.interval_count() == 4);
  CHECK(c.interval_of(0.1) == 0);
  CHECK(c.interval_of(0.5) == 2);
  CHECK(c.interval_of(0.99) == 3);
  auto total = 0.0;
  for (auto k = std::size_t{0}; k < c.interval_count(); ++k) total += c.interval_end(k) - c.interval_start(k);
  CHECK(total == doctest::Approx(c.interval_length()).epsilon(1e-15));
  CHECK(c.max_height() == 3.0);
}

TEST_CASE("face rules") {
  auto c = example_comb();
  auto at = [](double x, Face f) { return Boundary_point{x, f}; };
  CHECK(comb_distance(c, at(0.5, Face::left), at(0.5, Face::right)) == 2.0);
  CHECK(comb_distance(c, at(0.5, Face::left), at(0.5, Face::left)) == 0.0);
  CHECK(comb_distance(c, at(0.3, Face::left), at(0.3, Face::right)) == 0.0);
  CHECK(comb_distance(c, at(0.2, Face::right), at(0.8, Face::left)) == 2.0);
  CHECK(comb_distance(c, at(0.2, Face::left), at(0.8, Face::right)) == 6.0);
  CHECK(comb_distance(c, at(0.2, Face::right), at(0.8, Face::right)) == 4.0);
  CHECK(comb_distance(c, at(0.8, Face::right), at(0.2, Face::right)) == 4.0);
  CHECK(comb_distance(c, 0.6, 0.6) == 0.0);
  CHECK_THROWS_AS(comb_distance(c, at(1.5, Face::right), at(0.1, Face::right)), Validation_error);
  CHECK_THROWS_AS(comb_distance(c, at(0.0, Face::left), at(0.1, Face::right)), Validation_error);
  CHECK_NOTHROW(comb_distance(c, at(0.0, Face::right), at(1.0, Face::left)));
}

TEST_CASE("distances agree with the brute-force oracle") {
  auto rng = Random_source{11};
  for (auto rep = 0; rep < 200; ++rep) {
    auto c = random_comb(rng, 15);
    auto teeth = std::vector<Tooth>(c.teeth().begin(), c.teeth().end());
    auto xs = uniform_points(rng, 8);
    for (auto s : xs) {
      for (auto t : xs) REQUIRE(comb_distance(c, s, t) == oracle::comb_distance(teeth, s, t));
    }
  }
}

TEST_CASE("ultrametric inequality on random combs") {
  auto rng = Random_source{12};
  auto violations = 0;
  for (auto rep = 0; rep < 200; ++rep) {
    auto c = random_comb(rng, 20, rep % 2 == 0);
    auto d = pairwise_distances(c, uniform_points(rng, 10));
    for (auto x = std::size_t{0}; x < 10; ++x) {
      for (auto y = std::size_t{0}; y < 10; ++y) {
        for (auto z = std::size_t{0}; z < 10; ++z) {
          if (d(x, z) > std::max(d(x, y), d(y, z))) ++violations;
        }
      }
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("ball partition example") {
  auto c = example_comb();
  auto xs = std::vector<double>{0.1, 0.3, 0.6, 0.9};
  auto p = ball_partition(c, xs, 4.0);
  CHECK(p == Partition{{{0}, {1, 2, 3}}});
  CHECK(ball_partition(c, xs, 8.0) == Partition{{{0, 1, 2, 3}}});
  CHECK(ball_partition(c, xs, 1.0) == Partition{{{0}, {1}, {2}, {3}}});
  CHECK(ball_partition(c, std::vector<double>{}, 1.0).blocks.empty());
  CHECK_THROWS_AS(ball_partition(c, xs, 0.0), Validation_error);
}

TEST_CASE("ball partition matches pairwise classes and refines monotonically") {
  auto rng = Random_source{13};
  for (auto rep = 0; rep < 100; ++rep) {
    auto c = random_comb(rng, 12, true);
    auto xs = uniform_points(rng, 9);
    auto d = pairwise_distances(c, xs);
    auto previous = Partition{};
    for (auto r : {0.5, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0, 12.0}) {
      auto p = ball_partition(c, xs, r);
      REQUIRE(p.element_count() == xs.size());
      for (const auto& block : p.blocks) {
        for (auto i : block) {
          for (auto j : block) REQUIRE(d(i, j) <= r);
        }
      }
      for (auto a = std::size_t{0}; a < p.blocks.size(); ++a) {
        for (auto b = a + 1; b < p.blocks.size(); ++b) REQUIRE(d(p.blocks[a][0], p.blocks[b][0]) > r);
      }
      if (!previous.blocks.empty()) {
        REQUIRE(previous.refines(p));
        REQUIRE(previous.blocks.size() >= p.blocks.size());
      }
      previous = p;
    }
  }
}

TEST_CASE("comb from two points") {
  auto d = Distance_matrix{2};
  d(0, 1) = d(1, 0) = 3.0;
  auto u = comb_from_ultrametric(d);
  REQUIRE(u.comb.size() == 1);
  CHECK(u.comb.teeth()[0].height == 1.5);
  CHECK(u.comb.teeth()[0].position == 0.5);
  CHECK(u.placement[0] == std::pair{0.0, 0.5});
  CHECK(u.placement[1] == std::pair{0.5, 1.0});
}

TEST_CASE("triadic matrix on nine points") {
  auto d = Distance_matrix{9};
  for (auto i = std::size_t{0}; i < 9; ++i) {
    for (auto j = std::size_t{0}; j < 9; ++j) {
      if (i != j) d(i, j) = i / 3 == j / 3 ? 1.0 / 9.0 : 1.0 / 3.0;
    }
  }
  auto u = comb_from_ultrametric(d);
  auto high = 0;
  auto low = 0;
  for (const auto& t : u.comb.teeth()) {
    if (t.height == 0.5 / 3.0) ++high;
    if (t.height == 0.5 / 9.0) ++low;
  }
  CHECK(high == 2);
  CHECK(low == 6);
  CHECK(u.comb.size() == 8);
  CHECK(u.comb.interval_length() == doctest::Approx(1.0).epsilon(1e-15));
  for (const auto& [start, end] : u.placement) CHECK(end - start == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
  for (auto i = std::size_t{0}; i < 9; ++i) {
    for (auto j = std::size_t{0}; j < 9; ++j) {
      auto s = 0.5 * (u.placement[i].first + u.placement[i].second);
      auto t = 0.5 * (u.placement[j].first + u.placement[j].second);
      CHECK(comb_distance(u.comb, s, t) == doctest::Approx(d(i, j)).epsilon(1e-15));
    }
  }
}

TEST_CASE("masses set interval lengths") {
  auto d = Distance_matrix{3};
  d(0, 1) = d(1, 0) = 2.0;
  d(0, 2) = d(2, 0) = 4.0;
  d(1, 2) = d(2, 1) = 4.0;
  auto masses = std::vector<double>{0.5, 1.5, 2.0};
  auto u = comb_from_ultrametric(d, std::span<const double>{masses});
  CHECK(u.comb.interval_length() == doctest::Approx(4.0));
  for (auto i = 0; i < 3; ++i) {
    CHECK(u.placement[i].second - u.placement[i].first == doctest::Approx(masses[i]));
  }
  auto bad = std::vector<double>{1.0, -1.0, 1.0};
  CHECK_THROWS_AS(comb_from_ultrametric(d, std::span<const double>{bad}), Validation_error);
}

TEST_CASE("non-ultrametric input is rejected") {
  auto d = Distance_matrix{3};
  d(0, 1) = d(1, 0) = 1.0;
  d(1, 2) = d(2, 1) = 1.0;
  d(0, 2) = d(2, 0) = 3.0;
  CHECK_THROWS_AS(comb_from_ultrametric(d), Validation_error);
  auto asym = Distance_matrix{2};
  asym(0, 1) = 1.0;
  asym(1, 0) = 2.0;
  CHECK_THROWS_AS(validate_ultrametric(asym), Validation_error);
}

TEST_CASE("ultrametric round trip") {
  auto rng = Random_source{14};
  for (auto rep = 0; rep < 200; ++rep) {
    auto c = random_comb(rng, 20, rep % 3 == 0);
    auto xs = std::vector<double>{};
    for (auto k = std::size_t{0}; k < c.interval_count(); ++k) xs.push_back(0.5 * (c.interval_start(k) + c.interval_end(k)));
    auto d = pairwise_distances(c, xs);
    auto u = comb_from_ultrametric(d);
    auto mids = std::vector<double>{};
    for (const auto& [s, e] : u.placement) mids.push_back(0.5 * (s + e));
    auto back = pairwise_distances(u.comb, mids);
    for (auto i = std::size_t{0}; i < xs.size(); ++i) {
      for (auto j = std::size_t{0}; j < xs.size(); ++j) REQUIRE(back(i, j) == d(i, j));
    }
  }
}

TEST_CASE("tree of a comb without teeth") {
  auto t = comb_to_tree(Comb{1.0, 2.5, {}});
  auto leaves = t.leaves();
  REQUIRE(leaves.size() == 1);
  CHECK(t.at(leaves[0]).depth == 2.5);
  CHECK(t.to_newick() == "0:2.5;");
}

TEST_CASE("caterpillar tree") {
  auto c = Comb{3.0, 3.0, {{1.0, 1.0}, {2.0, 2.0}}};
  auto t = comb_to_tree(c);
  CHECK(t.to_newick() == "((0:1,1:1):1,2:2):1;");
  CHECK(t.path_length(t.find_leaf("0"), t.find_leaf("1")) == 2.0);
  CHECK(t.path_length(t.find_leaf("0"), t.find_leaf("2")) == 4.0);
  CHECK(t.path_length(t.find_leaf("1"), t.find_leaf("2")) == 4.0);
}

TEST_CASE("tree path lengths reproduce comb distances") {
  auto rng = Random_source{15};
  for (auto rep = 0; rep < 100; ++rep) {
    auto c = random_comb(rng, 12, rep % 2 == 0);
    auto t = comb_to_tree(c);
    auto leaves = t.leaves();
    REQUIRE(leaves.size() == c.interval_count());
    for (auto i = std::size_t{0}; i < leaves.size(); ++i) {
      REQUIRE(t.at(leaves[i]).label == std::to_string(i));
      REQUIRE(t.at(leaves[i]).depth == c.origin_height());
      for (auto j = i + 1; j < leaves.size(); ++j) {
        auto s = 0.5 * (c.interval_start(i) + c.interval_end(i));
        auto u = 0.5 * (c.interval_start(j) + c.interval_end(j));
        REQUIRE(t.path_length(leaves[i], leaves[j]) == doctest::Approx(comb_distance(c, s, u)).epsilon(1e-12));
      }
    }
    auto parsed = Tree::from_newick(t.to_newick(17));
    auto parsed_leaves = parsed.leaves();
    REQUIRE(parsed_leaves.size() == leaves.size());
    for (auto l : parsed_leaves) REQUIRE(parsed.at(l).depth == doctest::Approx(c.origin_height()).epsilon(1e-12));
  }
}

TEST_CASE("newick parsing") {
  auto t = Tree::from_newick("[config] ((a:1,b:2)x:0.5,c:3);");
  CHECK(t.leaves().size() == 3);
  CHECK(t.path_length(t.find_leaf("a"), t.find_leaf("b")) == 3.0);
  CHECK(t.path_length(t.find_leaf("a"), t.find_leaf("c")) == 4.5);
  CHECK_THROWS_AS(Tree::from_newick("((a:1,b:2);"), Validation_error);
}
