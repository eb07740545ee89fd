#include "ultracomb/samplers.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "ultracomb/error.h"

namespace ultracomb {

namespace {

// Sorts teeth by position and redraws the rare exact duplicates.
template <typename Draw>
void sort_distinct_positions(std::vector<Tooth>& teeth, Draw&& draw_position) {
  auto by_position = [](const Tooth& a, const Tooth& b) { return a.position < b.position; };
  std::sort(teeth.begin(), teeth.end(), by_position);
  while (true) {
    auto clash = std::adjacent_find(teeth.begin(), teeth.end(),
                                    [](const Tooth& a, const Tooth& b) { return a.position == b.position; });
    if (clash == teeth.end()) return;
    (clash + 1)->position = draw_position();
    std::sort(teeth.begin(), teeth.end(), by_position);
  }
}

}  // namespace

auto sample_kingman_comb(std::size_t n_teeth, Random_source& rng) -> Comb {
  if (n_teeth < 1) throw Validation_error{"Kingman comb needs at least one tooth"};
  auto n = n_teeth;
  auto K = static_cast<double>(n + 1);
  auto heights = std::vector<double>(n);
  auto tau = rng.gamma(3.0 * K, 2.0 / (3.0 * K * K));
  for (auto j = n; j >= 1; --j) {
    auto k = static_cast<double>(j + 1);
    tau += rng.exponential(k * (k - 1.0) / 2.0);
    heights[j - 1] = tau;
  }
  auto teeth = std::vector<Tooth>(n);
  for (auto j = std::size_t{0}; j < n; ++j) teeth[j] = {rng.uniform(), heights[j]};
  sort_distinct_positions(teeth, [&] { return rng.uniform(); });
  return Comb{1.0, heights[0] + 1.0, std::move(teeth)};
}

auto sample_cpp(const Intensity_model& m, double T, double eps, Random_source& rng) -> Cpp_sample {
  if (!(T > 0.0) || !std::isfinite(T)) throw Validation_error{"CPP height T must be positive and finite"};
  if (!(eps >= 0.0 && eps < T)) throw Validation_error{"truncation eps must satisfy 0 <= eps < T"};
  if (T > m.support_end() * (1.0 + 1e-12)) {
    throw Validation_error{"T exceeds the support of the intensity model (" + std::to_string(m.support_end()) + ")"};
  }
  auto tail_T = m.tail(T);
  auto tail_eps = m.tail(eps);
  if (!std::isfinite(tail_eps)) throw Validation_error{"nu_bar(eps) is not finite; choose eps > 0"};
  if (!(tail_T > 0.0) || !(tail_eps >= tail_T)) throw Validation_error{"intensity tail must be positive and nonincreasing"};

  auto width = rng.exponential(tail_T);
  auto mass = tail_eps - tail_T;
  auto count = rng.poisson(width * mass);
  auto teeth = std::vector<Tooth>{};
  teeth.reserve(count);
  for (auto i = std::uint64_t{0}; i < count; ++i) {
    auto h = 0.0;
    for (auto attempt = 0;; ++attempt) {
      h = m.tail_inverse(tail_T + rng.uniform() * mass);
      if (h > 0.0 && h >= eps && h < T) break;
      if (attempt > 1000) throw Numeric_error{"tail inverse keeps returning heights outside [eps, T)"};
    }
    teeth.push_back({rng.uniform(0.0, width), h});
  }
  sort_distinct_positions(teeth, [&] { return rng.uniform(0.0, width); });

  auto killing = std::optional<double>{};
  if (std::isinf(m.support_end())) killing = std::max(T, m.tail_inverse(rng.uniform() * tail_T));
  return Cpp_sample{Comb{width, T, std::move(teeth), eps}, width, killing};
}

auto padic_comb(int p, int depth) -> Comb {
  if (p < 2) throw Validation_error{"p-adic comb needs p >= 2"};
  if (depth < 1) throw Validation_error{"p-adic comb needs depth >= 1"};
  constexpr auto exact_limit = std::uint64_t{1} << 53;
  auto base = static_cast<std::uint64_t>(p);
  auto scale = std::uint64_t{1};
  for (auto d = 0; d < depth; ++d) {
    if (scale > exact_limit / base) {
      throw Validation_error{"p^depth exceeds 2^53; positions are not representable"};
    }
    scale *= base;
  }
  if (scale - 1 > k_padic_max_teeth) {
    throw Resource_error{"p-adic comb would have " + std::to_string(scale - 1) + " teeth (limit " +
                         std::to_string(k_padic_max_teeth) + ")"};
  }
  auto heights = std::vector<double>(static_cast<std::size_t>(depth) + 1);
  auto power = 1.0;
  for (auto n = 0; n <= depth; ++n) {
    heights[static_cast<std::size_t>(n)] = 1.0 / power;
    power *= static_cast<double>(p);
  }
  auto denominator = static_cast<double>(scale);
  auto teeth = std::vector<Tooth>{};
  teeth.reserve(scale - 1);
  for (auto j = std::uint64_t{1}; j < scale; ++j) {
    auto level = depth;
    for (auto k = j; k % base == 0; k /= base) --level;
    teeth.push_back({static_cast<double>(j) / denominator, heights[static_cast<std::size_t>(level)]});
  }
  return Comb{1.0, 1.0, std::move(teeth), heights[static_cast<std::size_t>(depth)]};
}

auto sample_splitting_tree(double b, const Lifetime& lifetime, double T, Random_source& rng,
                           Splitting_options options) -> Tree {
  if (!(b > 0.0) || !std::isfinite(b)) throw Validation_error{"birth rate must be positive"};
  if (!(T > 0.0) || !std::isfinite(T)) throw Validation_error{"horizon T must be positive"};
  if (lifetime.kind == Lifetime::Kind::density) {
    throw Validation_error{"splitting trees support immortal, exponential and fixed lifetimes"};
  }
  auto draw_lifetime = [&]() -> double {
    switch (lifetime.kind) {
      case Lifetime::Kind::exponential: return rng.exponential(lifetime.parameter);
      case Lifetime::Kind::fixed: return lifetime.parameter;
      default: return INFINITY;
    }
  };

  struct Pending {
    double birth;
    Node_index attach;
  };
  for (auto attempt = std::size_t{0}; attempt < options.max_retries; ++attempt) {
    auto tree = Tree{};
    auto root = tree.add_node(k_no_node, 0.0);
    auto queue = std::deque<Pending>{{0.0, root}};
    auto individuals = std::size_t{0};
    auto alive = std::size_t{0};
    while (!queue.empty()) {
      auto [birth, attach] = queue.front();
      queue.pop_front();
      if (++individuals > options.max_individuals) {
        throw Resource_error{"splitting tree exceeded " + std::to_string(options.max_individuals) + " individuals"};
      }
      auto death = birth + draw_lifetime();
      auto end = std::min(death, T);
      auto node = attach;
      for (auto t = birth + rng.exponential(b); t < end; t += rng.exponential(b)) {
        node = tree.add_node(node, t);
        queue.push_back({t, node});
      }
      tree.add_node(node, end, std::to_string(individuals - 1));
      if (death >= T) ++alive;
    }
    if (alive > 0) return tree;
  }
  throw Resource_error{"population went extinct before T in " + std::to_string(options.max_retries) + " attempts"};
}

auto reduce_population_tree(const Tree& tree, double T) -> Comb {
  auto survivors = std::vector<Node_index>{};
  for (auto leaf : tree.leaves()) {
    if (tree.at(leaf).depth >= T) survivors.push_back(leaf);
  }
  if (survivors.empty()) throw Validation_error{"no individual alive at T"};
  auto teeth = std::vector<Tooth>{};
  teeth.reserve(survivors.size() - 1);
  for (auto k = std::size_t{1}; k < survivors.size(); ++k) {
    auto meet = tree.at(tree.lca(survivors[k - 1], survivors[k])).depth;
    teeth.push_back({static_cast<double>(k), T - meet});
  }
  return Comb{static_cast<double>(survivors.size()), T, std::move(teeth)};
}

auto rescale_comb(const Comb& c, double eps) -> Comb {
  if (!(eps > 0.0 && eps <= 1.0)) throw Validation_error{"rescaling needs eps in (0, 1]"};
  auto window = std::min(c.interval_length(), eps);
  auto teeth = std::vector<Tooth>{};
  for (const auto& t : c.teeth()) {
    if (!(t.position < window)) break;
    teeth.push_back({t.position / eps, t.height / eps});
  }
  return Comb{window / eps, c.origin_height() / eps, std::move(teeth), c.truncation() / eps};
}

auto unscale_comb(const Comb& c, double eps) -> Comb {
  if (!(eps > 0.0 && eps <= 1.0)) throw Validation_error{"rescaling needs eps in (0, 1]"};
  auto teeth = std::vector<Tooth>{};
  teeth.reserve(c.size());
  for (const auto& t : c.teeth()) teeth.push_back({t.position * eps, t.height * eps});
  return Comb{c.interval_length() * eps, c.origin_height() * eps, std::move(teeth), c.truncation() * eps};
}

}  // namespace ultracomb
