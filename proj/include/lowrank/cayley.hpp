#pragma once

#include "lowrank/certificate.hpp"
#include "lowrank/matkit.hpp"

namespace lowrank {

// Coordinates of a Stiefel frame in the Cayley chart: values = vec(A) for a
// (p - r) x r matrix A with spectral norm below 1 - 1e-12.
class Phi {
 public:
  static constexpr double kDomainMargin = 1e-12;

  Phi(Eigen::Index p, Eigen::Index r, Vector values);
  static Phi from_matrix(Eigen::Index p, const Matrix& a);
  static Phi zero(Eigen::Index p, Eigen::Index r);

  Eigen::Index p() const { return p_; }
  Eigen::Index r() const { return r_; }
  Eigen::Index size() const { return values_.size(); }
  const Vector& values() const { return values_; }
  Matrix matrix() const;
  double norm() const { return a_norm_; }

 private:
  Eigen::Index p_;
  Eigen::Index r_;
  Vector values_;
  double a_norm_;
};

// Orthonormal p x r frame whose top r x r block is symmetric positive definite.
class StiefelPlus {
 public:
  explicit StiefelPlus(Matrix u);
  const Matrix& matrix() const { return u_; }
  Eigen::Index p() const { return u_.rows(); }
  Eigen::Index r() const { return u_.cols(); }

 private:
  Matrix u_;
};

Matrix skew_embed(const Phi& phi);
StiefelPlus cayley_map(const Phi& phi);
Phi cayley_inverse(const StiefelPlus& u);

// Gamma with Gamma * vec(A) = vec(X) for the skew embedding X of A. It does
// not depend on the point of evaluation.
Matrix gamma_matrix(Eigen::Index p, Eigen::Index r);

// Derivative of vec(U(phi)) with respect to phi, a pr x (p - r)r matrix.
Matrix cayley_jacobian(const Phi& phi);

struct UTaylorCertificates {
  Certificate lipschitz;
  Certificate remainder;
};

UTaylorCertificates taylor_certificate_U(const Phi& phi, const Phi& phi0);
Certificate lipschitz_certificate_A(const StiefelPlus& u, const StiefelPlus& u0);

}  // namespace lowrank
