#pragma once

#include <functional>

#include "pacmoo/core.hpp"

namespace pacmoo {

/// Objective returning f(x) and writing the gradient into the second argument.
using GradientObjective = std::function<double(const Vector&, Vector&)>;

struct LbfgsResult {
  Vector x;
  double value;
  int iterations;
  bool converged;
};

/// Box-constrained minimization: L-BFGS directions projected onto [lower, upper] with an
/// Armijo backtracking search along the projected path. Memory is dropped whenever the
/// active set changes.
LbfgsResult minimize_lbfgs_box(const GradientObjective& objective, Vector x0, const Vector& lower,
                               const Vector& upper, int max_iterations = 200, int memory = 8,
                               double gradient_tolerance = 1e-6);

}  // namespace pacmoo
