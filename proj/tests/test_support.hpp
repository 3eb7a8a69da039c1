#pragma once

#include <functional>

#include "lowrank/matkit.hpp"
#include "lowrank/rng.hpp"

namespace lowrank::testing {

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Philox4x32& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

inline Vector random_vector(Eigen::Index n, Philox4x32& rng) { return vec(random_matrix(n, 1, rng)); }

inline Matrix random_frame(Eigen::Index p, Eigen::Index r, Philox4x32& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(p, r, rng));
  return qr.householderQ() * identity_frame(p, r);
}

// Column j is (f(x + h e_j) - f(x - h e_j)) / 2h.
inline Matrix central_difference(const std::function<Vector(const Vector&)>& f, const Vector& x, double h = 1e-5) {
  const Vector f0 = f(x);
  Matrix jac(f0.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Vector xp = x;
    Vector xm = x;
    xp(j) += h;
    xm(j) -= h;
    jac.col(j) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return jac;
}

inline double relative_error(const Matrix& approx, const Matrix& exact) {
  return (approx - exact).norm() / std::max(exact.norm(), 1e-300);
}

}  // namespace lowrank::testing
