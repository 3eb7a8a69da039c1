#pragma once

#include <functional>

#include "lowrank/matkit.hpp"

namespace lowrank {

struct GaussNewtonOptions {
  double gradient_tolerance = 1e-10;
  int max_iterations = 100;
  int max_halvings = 30;
};

struct GaussNewtonResult {
  Vector x;
  int iterations = 0;
  double gradient_norm = 0.0;
  double objective = 0.0;  // 0.5 * ||residual||^2
};

// Evaluates residual = target - model(x) and, when jacobian is non-null, the
// Jacobian of model(x). Returns false when x lies outside the domain.
using ResidualFunction = std::function<bool(const Vector& x, Vector& residual, Matrix* jacobian)>;

// Damped Gauss-Newton for 0.5 ||target - model(x)||^2 with step halving.
GaussNewtonResult gauss_newton(const Vector& x0, const ResidualFunction& f, const GaussNewtonOptions& options = {});

}  // namespace lowrank
