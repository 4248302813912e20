#pragma once

#include <stdexcept>

namespace pubgame {

// Combination of options the model does not define, e.g. smooth dynamics
// under a non-differentiable ranking.
struct unsupported_config : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An exhaustive search would exceed its enumeration budget.
struct budget_exceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pubgame
