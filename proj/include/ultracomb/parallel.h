#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "ultracomb/random.h"

namespace ultracomb {

// Runs `body(index, rng)` for every replicate and returns the results in
// replicate order.  Replicate i always draws from
// Random_source::for_replicate(seed, i), so the output does not depend on
// `jobs`.  Shards are contiguous index ranges.
template <typename Body>
auto run_replicates(std::int64_t reps, std::uint64_t seed, int jobs, Body&& body) {
  using Result = decltype(body(std::int64_t{0}, std::declval<Random_source&>()));
  auto slots = std::vector<std::optional<Result>>(static_cast<std::size_t>(std::max<std::int64_t>(reps, 0)));
  auto run_range = [&](std::int64_t begin, std::int64_t end) {
    for (auto i = begin; i < end; ++i) {
      auto rng = Random_source::for_replicate(seed, static_cast<std::uint64_t>(i));
      slots[static_cast<std::size_t>(i)].emplace(body(i, rng));
    }
  };
  auto collect = [&] {
    auto results = std::vector<Result>{};
    results.reserve(slots.size());
    for (auto& s : slots) results.push_back(std::move(*s));
    return results;
  };

  jobs = std::clamp<int>(jobs, 1, 256);
  if (jobs == 1 || reps < 2) {
    run_range(0, reps);
    return collect();
  }

  auto first_error = std::exception_ptr{};
  auto error_lock = std::mutex{};
  auto workers = std::vector<std::thread>{};
  auto chunk = (reps + jobs - 1) / jobs;
  for (auto w = 0; w < jobs; ++w) {
    auto begin = std::min<std::int64_t>(reps, w * chunk);
    auto end = std::min<std::int64_t>(reps, begin + chunk);
    if (begin == end) break;
    workers.emplace_back([&, begin, end] {
      try {
        run_range(begin, end);
      } catch (...) {
        auto guard = std::scoped_lock{error_lock};
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return collect();
}

}  // namespace ultracomb
