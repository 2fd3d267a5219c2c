#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace spin7 {

struct DegenerateFieldError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonEllipticError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IllConditionedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

}  // namespace spin7
