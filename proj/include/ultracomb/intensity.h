#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ultracomb/comb.h"
#include "ultracomb/measure.h"

namespace ultracomb {

enum class Intensity_kind { brownian, critical_bd, from_W, custom };

auto to_string(Intensity_kind kind) -> std::string;

// A CPP intensity measure nu on (0, inf) through its tail nu_bar(x) =
// nu([x, inf)) and the inverse of the tail.  Heights at or above
// support_end() are outside the model (from_W only knows W on [0, T]).
class Intensity_model {
 public:
  using Function = std::function<double(double)>;

  Intensity_model(Intensity_kind kind, Function tail, Function tail_inverse,
                  double support_end = std::numeric_limits<double>::infinity());

  auto kind() const -> Intensity_kind { return kind_; }
  auto tail(double x) const -> double { return tail_(x); }
  auto tail_inverse(double v) const -> double { return tail_inverse_(v); }
  auto support_end() const -> double { return support_end_; }

 private:
  Intensity_kind kind_;
  Function tail_;
  Function tail_inverse_;
  double support_end_;
};

// nu_bar(x) = scale / x.  The Brownian excursion depth measure dx/(2x^2)
// has scale 1/2.
auto brownian_intensity(double scale = 0.5) -> Intensity_model;

// Critical birth-death with birth = death = rate: nu_bar(x) = 1/(1 + rate x).
auto critical_bd_intensity(double rate = 1.0) -> Intensity_model;

// Lifetime law of a time-homogeneous population model.
struct Lifetime {
  enum class Kind { immortal, exponential, fixed, density };
  Kind kind = Kind::immortal;
  double parameter = 0.0;  // death rate, or the fixed lifetime
  std::function<double(double)> pdf;  // Kind::density only

  static auto immortal() -> Lifetime { return {}; }
  static auto exponential(double rate) -> Lifetime;
  static auto fixed(double length) -> Lifetime;
  static auto with_density(std::function<double(double)> pdf) -> Lifetime;
  // "exponential(r)", "fixed(l)" or "immortal".
  static auto parse(const std::string& text) -> Lifetime;
  auto describe() const -> std::string;
};

struct Population_model {
  // Birth rate b(t) at forward time t.
  std::function<double(double)> birth_rate;
  Lifetime lifetime;

  static auto constant(double b, Lifetime lifetime) -> Population_model;
};

// W on a uniform grid of [0, T] with steps + 1 nodes.
class W_solution {
 public:
  W_solution(double horizon, std::vector<double> values);

  auto horizon() const -> double { return horizon_; }
  auto steps() const -> std::size_t { return values_.size() - 1; }
  auto step() const -> double { return horizon_ / static_cast<double>(steps()); }
  auto time(std::size_t i) const -> double { return horizon_ * static_cast<double>(i) / static_cast<double>(steps()); }
  auto values() const -> const std::vector<double>& { return values_; }
  // Linear interpolation on the grid, t clamped to [0, T].
  auto operator()(double t) const -> double;
  // Smallest t with W(t) = w, for w in [1, W(T)]; exact inside a grid cell.
  auto inverse(double w) const -> double;
  // nu_bar = 1 / W on [0, T].
  auto intensity() const -> Intensity_model;

 private:
  double horizon_;
  std::vector<double> values_;
};

// Solves W'(t) = b(T-t) (W(t) - int_0^t W(s) g(t-s) ds), W(0) = 1, with the
// trapezoidal rule.  The rule is implicit in W only through a linear term,
// so each step is a closed-form solve.
auto solve_W(const Population_model& m, double horizon, std::size_t steps) -> W_solution;

// A monotone bijection between depth scales.
class Time_change {
 public:
  using Function = std::function<double(double)>;

  Time_change(Function map, Function inverse, bool increasing, std::string name = "custom");

  static auto identity() -> Time_change;
  // t -> exp(-a t), the supercritical reduction.
  static auto exponential(double a) -> Time_change;
  // t -> T - t.
  static auto reflection(double horizon) -> Time_change;

  auto operator()(double t) const -> double { return map_(t); }
  auto inverse(double t) const -> double { return inverse_(t); }
  auto increasing() const -> bool { return increasing_; }
  auto inverted() const -> Time_change;
  auto name() const -> const std::string& { return name_; }

 private:
  Function map_;
  Function inverse_;
  bool increasing_;
  std::string name_;
};

// Heights are mapped through psi.  An increasing psi maps depths to
// depths.  A decreasing psi reads depths as distances from the root
// (origin_height - h), as in the reduction of a pure-birth tree: the new
// origin is psi(0) and a tooth of depth h becomes psi(T - h).
auto time_change_comb(const Comb& c, const Time_change& psi) -> Comb;

// mu_psi = mu o psi^{-1}.
auto mutation_rate_pushforward(const Mutation_measure& mu, const Time_change& psi) -> Mutation_measure;

// Tail exp(beta(phi^{-1}(t))) of the CPP obtained from a pure-birth process
// with cumulative birth intensity beta by the time change phi.
auto pure_birth_intensity(std::function<double(double)> cumulative_birth, const Time_change& phi) -> Intensity_model;

}  // namespace ultracomb
