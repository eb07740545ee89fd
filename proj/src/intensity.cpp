#include "ultracomb/intensity.h"

#include <algorithm>
#include <cmath>
#include <regex>

#include "ultracomb/error.h"

namespace ultracomb {

auto to_string(Intensity_kind kind) -> std::string {
  switch (kind) {
    case Intensity_kind::brownian: return "brownian";
    case Intensity_kind::critical_bd: return "critical_bd";
    case Intensity_kind::from_W: return "from_W";
    case Intensity_kind::custom: return "custom";
  }
  return "custom";
}

Intensity_model::Intensity_model(Intensity_kind kind, Function tail, Function tail_inverse, double support_end)
    : kind_{kind}, tail_{std::move(tail)}, tail_inverse_{std::move(tail_inverse)}, support_end_{support_end} {
  if (!tail_ || !tail_inverse_) throw Validation_error{"intensity model needs a tail and its inverse"};
  if (!(support_end_ > 0.0)) throw Validation_error{"intensity support must be nonempty"};
}

auto brownian_intensity(double scale) -> Intensity_model {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw Validation_error{"brownian scale must be positive"};
  return Intensity_model{Intensity_kind::brownian, [scale](double x) { return scale / x; },
                         [scale](double v) { return scale / v; }};
}

auto critical_bd_intensity(double rate) -> Intensity_model {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw Validation_error{"birth-death rate must be positive"};
  return Intensity_model{Intensity_kind::critical_bd, [rate](double x) { return 1.0 / (1.0 + rate * x); },
                         [rate](double v) { return (1.0 / v - 1.0) / rate; }};
}

auto Lifetime::exponential(double rate) -> Lifetime {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw Validation_error{"death rate must be positive"};
  return Lifetime{Kind::exponential, rate, {}};
}

auto Lifetime::fixed(double length) -> Lifetime {
  if (!(length > 0.0) || !std::isfinite(length)) throw Validation_error{"fixed lifetime must be positive"};
  return Lifetime{Kind::fixed, length, {}};
}

auto Lifetime::with_density(std::function<double(double)> pdf) -> Lifetime {
  if (!pdf) throw Validation_error{"lifetime density missing"};
  return Lifetime{Kind::density, 0.0, std::move(pdf)};
}

auto Lifetime::parse(const std::string& text) -> Lifetime {
  static const auto pattern = std::regex{R"(\s*(immortal|exponential|fixed)\s*(?:\(\s*([^)\s]+)\s*\))?\s*)"};
  auto match = std::smatch{};
  if (!std::regex_match(text, match, pattern)) throw Validation_error{"unknown lifetime '" + text + "'"};
  auto kind = match[1].str();
  if (kind == "immortal") {
    if (match[2].matched) throw Validation_error{"immortal takes no parameter"};
    return immortal();
  }
  if (!match[2].matched) throw Validation_error{kind + " lifetime needs a parameter"};
  auto value = 0.0;
  try {
    value = std::stod(match[2].str());
  } catch (const std::logic_error&) {
    throw Validation_error{"bad lifetime parameter '" + match[2].str() + "'"};
  }
  return kind == "exponential" ? exponential(value) : fixed(value);
}

auto Lifetime::describe() const -> std::string {
  switch (kind) {
    case Kind::immortal: return "immortal";
    case Kind::exponential: return "exponential(" + std::to_string(parameter) + ")";
    case Kind::fixed: return "fixed(" + std::to_string(parameter) + ")";
    case Kind::density: return "density";
  }
  return "density";
}

auto Population_model::constant(double b, Lifetime lifetime) -> Population_model {
  if (!(b > 0.0) || !std::isfinite(b)) throw Validation_error{"birth rate must be positive"};
  return Population_model{[b](double) { return b; }, std::move(lifetime)};
}

W_solution::W_solution(double horizon, std::vector<double> values) : horizon_{horizon}, values_{std::move(values)} {
  if (values_.size() < 2) throw Validation_error{"W grid needs at least two nodes"};
}

auto W_solution::operator()(double t) const -> double {
  t = std::clamp(t, 0.0, horizon_);
  auto x = t / step();
  auto i = std::min(static_cast<std::size_t>(x), steps() - 1);
  auto w = x - static_cast<double>(i);
  return values_[i] + w * (values_[i + 1] - values_[i]);
}

auto W_solution::inverse(double w) const -> double {
  if (w <= values_.front()) return 0.0;
  if (w >= values_.back()) return horizon_;
  auto it = std::lower_bound(values_.begin(), values_.end(), w);
  auto i = static_cast<std::size_t>(it - values_.begin()) - 1;
  auto lo = values_[i];
  auto hi = values_[i + 1];
  auto frac = hi > lo ? (w - lo) / (hi - lo) : 0.0;
  return (static_cast<double>(i) + frac) * step();
}

auto W_solution::intensity() const -> Intensity_model {
  for (auto i = std::size_t{1}; i < values_.size(); ++i) {
    if (values_[i] < values_[i - 1]) {
      throw Numeric_error{"W decreases at grid node " + std::to_string(i) + "; 1/W is not a tail function"};
    }
  }
  auto self = *this;
  return Intensity_model{Intensity_kind::from_W, [self](double x) { return 1.0 / self(x); },
                         [self](double v) { return self.inverse(1.0 / v); }, horizon_};
}

namespace {

// Convolution K(t) = int_0^t W(s) g(t - s) ds, updated one grid step at a
// time.  next() returns (c0, c1) with K(t_{n+1}) = c0 + c1 W_{n+1}.
class Death_kernel {
 public:
  Death_kernel(const Lifetime& lifetime, double dt, std::size_t steps) : lifetime_{lifetime}, dt_{dt} {
    if (lifetime.kind == Lifetime::Kind::exponential) {
      auto r = lifetime.parameter;
      decay_ = std::exp(-r * dt);
      // Exact weights of int_0^dt r e^{-r(dt-u)} (linear W) du.
      auto mass = -std::expm1(-r * dt);
      auto rd = r * dt;
      weight_new_ = rd < 1e-8 ? rd / 2.0 : mass - (mass - rd * decay_) / rd;
      weight_old_ = mass - weight_new_;
    } else if (lifetime.kind == Lifetime::Kind::density) {
      density_.resize(steps + 1);
      auto total = 0.0;
      for (auto k = std::size_t{0}; k <= steps; ++k) {
        density_[k] = lifetime.pdf(static_cast<double>(k) * dt);
        if (!std::isfinite(density_[k]) || density_[k] < 0.0) {
          throw Numeric_error{"lifetime density is not finite and nonnegative at u = " +
                              std::to_string(static_cast<double>(k) * dt)};
        }
        total += (k == 0 || k == steps ? 0.5 : 1.0) * density_[k] * dt;
      }
      if (total > 1.0 + 1e-6) {
        throw Numeric_error{"lifetime density integrates to " + std::to_string(total) + " > 1 on [0, T]"};
      }
    }
  }

  auto next(const std::vector<double>& w, std::size_t n) -> std::pair<double, double> {
    switch (lifetime_.kind) {
      case Lifetime::Kind::immortal: return {0.0, 0.0};
      case Lifetime::Kind::exponential: {
        // K_{n+1} = e^{-r dt} K_n + weight_old W_n + weight_new W_{n+1}
        auto c0 = decay_ * state_ + weight_old_ * w[n];
        return {c0, weight_new_};
      }
      case Lifetime::Kind::fixed: {
        auto s = static_cast<double>(n + 1) * dt_ - lifetime_.parameter;
        if (s < 0.0) return {0.0, 0.0};
        auto x = s / dt_;
        auto k = static_cast<std::size_t>(x);
        auto frac = x - static_cast<double>(k);
        if (k >= n + 1) return {0.0, 1.0};
        if (k + 1 == n + 1) return {(1.0 - frac) * w[k], frac};
        return {(1.0 - frac) * w[k] + frac * w[k + 1], 0.0};
      }
      case Lifetime::Kind::density: {
        auto m = n + 1;
        auto c0 = 0.5 * w[0] * density_[m];
        for (auto j = std::size_t{1}; j < m; ++j) c0 += w[j] * density_[m - j];
        return {c0 * dt_, 0.5 * dt_ * density_[0]};
      }
    }
    return {0.0, 0.0};
  }

  void commit(double c0, double c1, double w_next) { state_ = c0 + c1 * w_next; }

 private:
  const Lifetime& lifetime_;
  double dt_;
  double decay_ = 1.0;
  double weight_old_ = 0.0;
  double weight_new_ = 0.0;
  double state_ = 0.0;
  std::vector<double> density_;
};

}  // namespace

auto solve_W(const Population_model& m, double horizon, std::size_t steps) -> W_solution {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw Validation_error{"T must be positive and finite"};
  if (steps < 16) throw Validation_error{"solve_W needs at least 16 steps"};
  if (!m.birth_rate) throw Validation_error{"population model has no birth rate"};

  auto dt = horizon / static_cast<double>(steps);
  auto kernel = Death_kernel{m.lifetime, dt, steps};
  auto birth = [&](std::size_t i) {
    auto b = m.birth_rate(horizon - static_cast<double>(i) * dt);
    if (!std::isfinite(b) || b < 0.0) throw Validation_error{"birth rate must be finite and nonnegative"};
    return b;
  };

  auto w = std::vector<double>(steps + 1);
  w[0] = 1.0;
  auto k_now = 0.0;
  auto b_now = birth(0);
  for (auto n = std::size_t{0}; n < steps; ++n) {
    auto f_now = b_now * (w[n] - k_now);
    auto b_next = birth(n + 1);
    auto [c0, c1] = kernel.next(w, n);
    auto denom = 1.0 - 0.5 * dt * b_next * (1.0 - c1);
    if (!(denom > 0.0)) throw Numeric_error{"solve_W step is unstable; increase steps"};
    w[n + 1] = (w[n] + 0.5 * dt * f_now - 0.5 * dt * b_next * c0) / denom;
    if (!std::isfinite(w[n + 1])) {
      throw Numeric_error{"W is not finite at t = " + std::to_string(static_cast<double>(n + 1) * dt)};
    }
    kernel.commit(c0, c1, w[n + 1]);
    k_now = c0 + c1 * w[n + 1];
    b_now = b_next;
  }
  return W_solution{horizon, std::move(w)};
}

Time_change::Time_change(Function map, Function inverse, bool increasing, std::string name)
    : map_{std::move(map)}, inverse_{std::move(inverse)}, increasing_{increasing}, name_{std::move(name)} {
  if (!map_ || !inverse_) throw Validation_error{"time change needs a map and its inverse"};
}

auto Time_change::identity() -> Time_change {
  return Time_change{[](double t) { return t; }, [](double t) { return t; }, true, "identity"};
}

auto Time_change::exponential(double a) -> Time_change {
  if (!(a > 0.0) || !std::isfinite(a)) throw Validation_error{"exponential time change needs a > 0"};
  return Time_change{[a](double t) { return std::exp(-a * t); }, [a](double x) { return -std::log(x) / a; }, false,
                     "exp(-a t)"};
}

auto Time_change::reflection(double horizon) -> Time_change {
  return Time_change{[horizon](double t) { return horizon - t; }, [horizon](double x) { return horizon - x; }, false,
                     "T - t"};
}

auto Time_change::inverted() const -> Time_change { return Time_change{inverse_, map_, increasing_, name_ + "^-1"}; }

auto time_change_comb(const Comb& c, const Time_change& psi) -> Comb {
  auto top = c.origin_height();
  auto coordinate = [&](double h) { return psi.increasing() ? h : top - h; };
  auto new_origin = psi(coordinate(top));
  auto teeth = std::vector<Tooth>{};
  teeth.reserve(c.size());
  auto check = [&](double image, double preimage) {
    if (!std::isfinite(image) || image < 0.0) {
      throw Validation_error{"time change is undefined at " + std::to_string(preimage)};
    }
  };
  check(new_origin, top);
  for (const auto& t : c.teeth()) {
    auto h = psi(coordinate(t.height));
    check(h, t.height);
    if (!(h > 0.0) || !(h < new_origin)) {
      throw Validation_error{"time change is not monotone on [0, origin_height]"};
    }
    teeth.push_back({t.position, h});
  }
  auto truncation = c.truncation() > 0.0 && psi.increasing() ? psi(c.truncation()) : 0.0;
  return Comb{c.interval_length(), new_origin, std::move(teeth), truncation};
}

auto mutation_rate_pushforward(const Mutation_measure& mu, const Time_change& psi) -> Mutation_measure {
  if (mu.is_zero()) return Mutation_measure::zero();
  if (psi.increasing()) {
    return Mutation_measure{[mu, psi](double x) { return mu.level(psi.inverse(x)); },
                            [mu, psi](double v) { return psi(mu.level_inverse(v)); }, mu.name() + " o " + psi.name()};
  }
  // mu_psi((x, y]) = mu([psi^{-1}(y), psi^{-1}(x))): the level function
  // flips sign.
  return Mutation_measure{[mu, psi](double x) { return -mu.level(psi.inverse(x)); },
                          [mu, psi](double v) { return psi(mu.level_inverse(-v)); }, mu.name() + " o " + psi.name()};
}

auto pure_birth_intensity(std::function<double(double)> cumulative_birth, const Time_change& phi) -> Intensity_model {
  if (phi.increasing()) throw Validation_error{"pure-birth reduction needs a decreasing time change"};
  // nu_bar(t) = exp(beta(phi^{-1}(t))); the inverse needs beta^{-1}, found
  // by bisection since beta is only known pointwise.
  auto beta = std::move(cumulative_birth);
  auto tail = [beta, phi](double t) { return std::exp(beta(phi.inverse(t))); };
  auto tail_inverse = [beta, phi](double v) {
    auto target = std::log(v);
    if (target <= 0.0) return phi(0.0);
    auto lo = 0.0;
    auto hi = 1.0;
    while (beta(hi) < target) {
      hi *= 2.0;
      if (hi > 1e300) throw Numeric_error{"cumulative birth intensity is bounded; tail inverse undefined"};
    }
    for (auto it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      auto mid = 0.5 * (lo + hi);
      (beta(mid) < target ? lo : hi) = mid;
    }
    return phi(0.5 * (lo + hi));
  };
  return Intensity_model{Intensity_kind::custom, tail, tail_inverse, phi(0.0)};
}

}  // namespace ultracomb
