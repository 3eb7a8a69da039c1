#include "lowrank/cayley.hpp"

#include <cmath>
#include <numbers>

#include "lowrank/errors.hpp"

namespace lowrank {

namespace {

constexpr double kFrameTolerance = 1e-10;

Eigen::PartialPivLU<Matrix> factor_i_minus_x(const Matrix& x) {
  return Eigen::PartialPivLU<Matrix>(Matrix::Identity(x.rows(), x.cols()) - x);
}

Matrix checked_solve(const Eigen::PartialPivLU<Matrix>& lu, const Matrix& lhs, const Matrix& b) {
  Matrix z = lu.solve(b);
  const double residual = (lhs * z - b).norm();
  require(residual <= 1e-10 * std::max(1.0, b.norm()), ErrorCode::DomainViolation,
          "Cayley solve residual too large");
  return z;
}

}  // namespace

Phi::Phi(Eigen::Index p, Eigen::Index r, Vector values) : p_(p), r_(r), values_(std::move(values)) {
  require(r >= 1 && r <= p, ErrorCode::DimensionMismatch, "Phi: need 1 <= r <= p");
  require(values_.size() == (p - r) * r, ErrorCode::DimensionMismatch, "Phi: length must be (p-r)r");
  require(values_.allFinite(), ErrorCode::DomainViolation, "Phi: non-finite entries");
  a_norm_ = spectral_norm(matrix());
  require(a_norm_ < 1.0 - kDomainMargin, ErrorCode::DomainViolation, "Phi: spectral norm of A must be < 1");
}

Phi Phi::from_matrix(Eigen::Index p, const Matrix& a) {
  require(a.rows() == p - a.cols(), ErrorCode::DimensionMismatch, "Phi: A must be (p-r) x r");
  return Phi(p, a.cols(), vec(a));
}

Phi Phi::zero(Eigen::Index p, Eigen::Index r) { return Phi(p, r, Vector::Zero((p - r) * r)); }

Matrix Phi::matrix() const { return Eigen::Map<const Matrix>(values_.data(), p_ - r_, r_); }

StiefelPlus::StiefelPlus(Matrix u) : u_(std::move(u)) {
  require(u_.cols() >= 1 && u_.cols() <= u_.rows(), ErrorCode::DimensionMismatch,
          "StiefelPlus: need 1 <= r <= p");
  require(is_orthonormal(u_, kFrameTolerance), ErrorCode::NotOrthonormal, "StiefelPlus: columns not orthonormal");
  const Matrix top = u_.topRows(u_.cols());
  require((top - top.transpose()).cwiseAbs().maxCoeff() <= kFrameTolerance, ErrorCode::TopBlockNotPD,
          "StiefelPlus: top block not symmetric");
  const double lambda_min = Eigen::SelfAdjointEigenSolver<Matrix>(symmetrize(top)).eigenvalues().minCoeff();
  require(lambda_min > kFrameTolerance, ErrorCode::TopBlockNotPD, "StiefelPlus: top block not positive definite");
}

Matrix skew_embed(const Phi& phi) {
  const Eigen::Index p = phi.p();
  const Eigen::Index r = phi.r();
  Matrix x = Matrix::Zero(p, p);
  const Matrix a = phi.matrix();
  x.bottomLeftCorner(p - r, r) = a;
  x.topRightCorner(r, p - r) = -a.transpose();
  return x;
}

StiefelPlus cayley_map(const Phi& phi) {
  const Eigen::Index p = phi.p();
  const Eigen::Index r = phi.r();
  const Matrix x = skew_embed(phi);
  const Matrix i_minus_x = Matrix::Identity(p, p) - x;
  const auto lu = factor_i_minus_x(x);
  const Matrix z = checked_solve(lu, i_minus_x, identity_frame(p, r));
  Matrix u = (Matrix::Identity(p, p) + x) * z;
  // Remove the roundoff asymmetry of the top block so the frame validates.
  u.topRows(r) = symmetrize(u.topRows(r));
  return StiefelPlus(std::move(u));
}

Phi cayley_inverse(const StiefelPlus& frame) {
  const Matrix& u = frame.matrix();
  const Eigen::Index p = u.rows();
  const Eigen::Index r = u.cols();
  const Matrix q1 = symmetrize(u.topRows(r));
  const Matrix q2 = u.bottomRows(p - r);
  // A (I + Q1) = Q2, solved as (I + Q1) A^T = Q2^T with Q1 symmetric.
  const Matrix a = (Matrix::Identity(r, r) + q1).ldlt().solve(q2.transpose()).transpose();
  return Phi::from_matrix(p, a);
}

Matrix gamma_matrix(Eigen::Index p, Eigen::Index r) {
  require(r >= 1 && r <= p, ErrorCode::DimensionMismatch, "gamma_matrix: need 1 <= r <= p");
  const Matrix theta1_t = identity_frame(p, r);
  Matrix theta2_t = Matrix::Zero(p, p - r);
  theta2_t.bottomRows(p - r) = Matrix::Identity(p - r, p - r);
  const Matrix i_minus_k = Matrix::Identity(p * p, p * p) - commutation_matrix(p, p);
  return i_minus_k * kron(theta1_t, theta2_t);
}

Matrix cayley_jacobian(const Phi& phi) {
  const Eigen::Index p = phi.p();
  const Eigen::Index r = phi.r();
  const Matrix x = skew_embed(phi);
  const Matrix i_minus_x = Matrix::Identity(p, p) - x;
  const auto lu = factor_i_minus_x(x);
  const Matrix inv = checked_solve(lu, i_minus_x, Matrix::Identity(p, p));
  const Matrix left = identity_frame(p, r).transpose() * inv.transpose();
  return 2.0 * kron(left, inv) * gamma_matrix(p, r);
}

UTaylorCertificates taylor_certificate_U(const Phi& phi, const Phi& phi0) {
  require(phi.p() == phi0.p() && phi.r() == phi0.r(), ErrorCode::DimensionMismatch,
          "taylor_certificate_U: dimensions differ");
  const Vector delta = phi.values() - phi0.values();
  const double dn = delta.norm();
  const Matrix u = cayley_map(phi).matrix();
  const Matrix u0 = cayley_map(phi0).matrix();
  const Vector linear = cayley_jacobian(phi0) * delta;
  const Vector remainder = vec(u) - vec(u0) - linear;
  return {Certificate::at_most("cayley.lipschitz", (u - u0).norm(), 2.0 * std::numbers::sqrt2 * dn),
          Certificate::at_most("cayley.taylor_remainder", remainder.norm(), 8.0 * dn * dn)};
}

Certificate lipschitz_certificate_A(const StiefelPlus& u, const StiefelPlus& u0) {
  require(u.p() == u0.p() && u.r() == u0.r(), ErrorCode::DimensionMismatch,
          "lipschitz_certificate_A: dimensions differ");
  const Matrix a = cayley_inverse(u).matrix();
  const Matrix a0 = cayley_inverse(u0).matrix();
  return Certificate::at_most("cayley.inverse_lipschitz", (a - a0).norm(),
                              2.0 * (u.matrix() - u0.matrix()).norm());
}

}  // namespace lowrank
