#include "ultracomb/measure.h"

#include <cmath>

#include "ultracomb/error.h"

namespace ultracomb {

Mutation_measure::Mutation_measure(Function level, Function level_inverse, std::string name)
    : level_{std::move(level)}, level_inverse_{std::move(level_inverse)}, name_{std::move(name)} {
  if (!level_ || !level_inverse_) throw Validation_error{"mutation measure needs a level function and its inverse"};
}

auto Mutation_measure::zero() -> Mutation_measure {
  auto m = Mutation_measure{[](double) { return 0.0; }, [](double) { return 0.0; }, "zero"};
  m.zero_ = true;
  return m;
}

auto Mutation_measure::uniform(double theta) -> Mutation_measure {
  if (!(theta >= 0.0) || !std::isfinite(theta)) throw Validation_error{"theta must be finite and nonnegative"};
  if (theta == 0.0) return zero();
  return Mutation_measure{[theta](double x) { return theta * x; }, [theta](double v) { return v / theta; },
                          "uniform"};
}

auto Mutation_measure::mass(double x, double y) const -> double {
  if (zero_ || y <= x) return 0.0;
  auto m = level_(y) - level_(x);
  if (std::isnan(m) || m < 0.0) throw Validation_error{"mutation measure level function is not nondecreasing"};
  return m;
}

}  // namespace ultracomb
