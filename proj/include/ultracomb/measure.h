#pragma once

#include <functional>
#include <string>

namespace ultracomb {

// A diffuse measure on depths, given by a level function F with
// mu((x, y]) = F(y) - F(x).  F may be -infinity at 0 when mu has infinite
// mass near the leaves (time-changed rates such as theta / (a t)).
class Mutation_measure {
 public:
  using Function = std::function<double(double)>;

  Mutation_measure(Function level, Function level_inverse, std::string name = "custom");

  static auto zero() -> Mutation_measure;
  // theta * Lebesgue.
  static auto uniform(double theta) -> Mutation_measure;

  auto level(double x) const -> double { return level_(x); }
  auto level_inverse(double v) const -> double { return level_inverse_(v); }
  // mu((x, y]).
  auto mass(double x, double y) const -> double;
  // mu([0, t]); infinite when F(0) = -infinity.
  auto cumulative(double t) const -> double { return mass(0.0, t); }
  auto is_zero() const -> bool { return zero_; }
  auto name() const -> const std::string& { return name_; }

 private:
  Function level_;
  Function level_inverse_;
  std::string name_;
  bool zero_ = false;
};

}  // namespace ultracomb
