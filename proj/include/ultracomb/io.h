#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "ultracomb/coders.h"
#include "ultracomb/comb.h"
#include "ultracomb/intensity.h"
#include "ultracomb/mutation.h"

namespace ultracomb {

using Json = nlohmann::ordered_json;

// {"interval_length": a, "origin_height": T, "teeth": [{"pos": x, "h": y}, ...]}
// plus "truncation" when positive.  Unknown keys are ignored on input.
auto comb_to_json(const Comb& c) -> Json;
auto comb_from_json(const Json& j) -> Comb;

// [{"branch": "origin" | index, "depth": y}, ...]; input may also be an
// object holding that array under "mutations".
auto mutations_to_json(std::span<const Mutation> ms) -> Json;
auto mutations_from_json(const Json& j) -> std::vector<Mutation>;

// {"breakpoints": [{"t": time, "before": h(t-), "after": h(t)}, ...]}; a
// bare array is accepted on input.
auto contour_to_json(const Contour_function& h) -> Json;
auto contour_from_json(const Json& j) -> Contour_function;

struct Model_spec {
  Population_model model;
  double T = 1.0;
  std::size_t steps = 10000;
};

// {"birth_rate": b | {"grid": [[t, b], ...]}, "lifetime": "exponential(r)" |
// "fixed(l)" | "immortal", "T": ..., "steps": ...}.  A grid birth rate is
// interpolated linearly and held constant outside its range.
auto model_spec_from_json(const Json& j) -> Model_spec;

// CSV with header t,W,nu_tail.
auto w_to_csv(const W_solution& w) -> std::string;

auto parse_json(const std::string& text) -> Json;
auto read_text_file(const std::filesystem::path& path) -> std::string;
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ultracomb
