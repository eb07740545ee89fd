#pragma once

#include <stdexcept>
#include <string>

namespace ultracomb {

// Bad input: malformed comb, non-ultrametric matrix, inconsistent counts.
class Validation_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failure: divergent integral, non-finite solver state.
class Numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A stochastic procedure exhausted its retry budget.
class Resource_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Level T is never reached by the contour.
class Empty_sphere_error : public Validation_error {
 public:
  using Validation_error::Validation_error;
};

}  // namespace ultracomb
