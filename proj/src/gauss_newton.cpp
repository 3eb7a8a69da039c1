#include "lowrank/gauss_newton.hpp"

#include "lowrank/errors.hpp"

namespace lowrank {

GaussNewtonResult gauss_newton(const Vector& x0, const ResidualFunction& f, const GaussNewtonOptions& options) {
  GaussNewtonResult out;
  out.x = x0;
  Vector residual;
  Matrix jac;
  require(f(out.x, residual, &jac), ErrorCode::ProjectionFailed, "gauss_newton: start lies outside the domain");
  out.objective = 0.5 * residual.squaredNorm();
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const Vector gradient = jac.transpose() * residual;
    out.gradient_norm = gradient.norm();
    if (out.gradient_norm <= options.gradient_tolerance) break;
    const Vector step = jac.colPivHouseholderQr().solve(residual);
    bool accepted = false;
    double scale = 1.0;
    for (int h = 0; h <= options.max_halvings; ++h, scale *= 0.5) {
      const Vector trial = out.x + scale * step;
      Vector trial_residual;
      if (!f(trial, trial_residual, nullptr)) continue;
      const double trial_objective = 0.5 * trial_residual.squaredNorm();
      if (trial_objective < out.objective) {
        out.x = trial;
        out.objective = trial_objective;
        accepted = true;
        break;
      }
    }
    out.iterations = iter + 1;
    if (!accepted) break;
    require(f(out.x, residual, &jac), ErrorCode::ProjectionFailed, "gauss_newton: accepted point left the domain");
  }
  out.gradient_norm = (jac.transpose() * residual).norm();
  return out;
}

}  // namespace lowrank
