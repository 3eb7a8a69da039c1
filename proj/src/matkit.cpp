#include "lowrank/matkit.hpp"

#include <algorithm>
#include <cmath>

#include "lowrank/errors.hpp"

namespace lowrank {

Vector vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  require(v.size() == rows * cols, ErrorCode::DimensionMismatch, "unvec: length does not match shape");
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

bool is_symmetric(const Matrix& s) {
  if (s.rows() != s.cols()) return false;
  const double scale = s.size() == 0 ? 0.0 : s.cwiseAbs().maxCoeff();
  const double asym = s.size() == 0 ? 0.0 : (s - s.transpose()).cwiseAbs().maxCoeff();
  return asym <= 1e-10 * (1.0 + scale);
}

Eigen::Index vech_length(Eigen::Index r) { return r * (r + 1) / 2; }

Eigen::Index vech_index(Eigen::Index i, Eigen::Index j, Eigen::Index r) {
  return j * r - j * (j - 1) / 2 + (i - j);
}

Vector vech(const Matrix& s) {
  require(s.rows() == s.cols(), ErrorCode::DimensionMismatch, "vech: matrix is not square");
  require(is_symmetric(s), ErrorCode::AsymmetricInput, "vech: matrix is not symmetric");
  const Eigen::Index r = s.rows();
  Vector out(vech_length(r));
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < r; ++j)
    for (Eigen::Index i = j; i < r; ++i) out(k++) = s(i, j);
  return out;
}

Matrix unvech(const Vector& v, Eigen::Index r) {
  require(v.size() == vech_length(r), ErrorCode::DimensionMismatch, "unvech: length is not r(r+1)/2");
  Matrix s(r, r);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < r; ++j)
    for (Eigen::Index i = j; i < r; ++i) {
      s(i, j) = v(k);
      s(j, i) = v(k);
      ++k;
    }
  return s;
}

Matrix commutation_matrix(Eigen::Index p, Eigen::Index q) {
  Matrix k = Matrix::Zero(p * q, p * q);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < q; ++j) k(j + i * q, i + j * p) = 1.0;
  return k;
}

Matrix duplication_matrix(Eigen::Index r) {
  Matrix d = Matrix::Zero(r * r, vech_length(r));
  for (Eigen::Index j = 0; j < r; ++j)
    for (Eigen::Index i = 0; i < r; ++i)
      d(i + j * r, vech_index(std::max(i, j), std::min(i, j), r)) = 1.0;
  return d;
}

Matrix duplication_pinv(Eigen::Index r) {
  // D has orthogonal columns, so the pseudoinverse is (D^T D)^{-1} D^T with a
  // diagonal Gram matrix.
  const Matrix d = duplication_matrix(r);
  const Vector col_norms = d.colwise().squaredNorm().transpose();
  return col_norms.cwiseInverse().asDiagonal() * d.transpose();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

bool is_orthonormal(const Matrix& u, double tol) {
  if (u.cols() > u.rows()) return false;
  const Matrix gram = u.transpose() * u;
  return (gram - Matrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

SinThetaResult sin_theta(const Matrix& u0, const Matrix& u) {
  require(u0.rows() == u.rows() && u0.cols() == u.cols(), ErrorCode::DimensionMismatch,
          "sin_theta: frames differ in shape");
  require(is_orthonormal(u0) && is_orthonormal(u), ErrorCode::NotOrthonormal,
          "sin_theta: frame is not orthonormal");
  if (u0 == u) return {Vector::Zero(u.cols()), 0.0, 0.0};
  const Vector cosines = Eigen::JacobiSVD<Matrix>(u0.transpose() * u).singularValues();
  // Sines from the residual of projecting U onto span(U0); accurate for small
  // angles where 1 - cos^2 cancels.
  const Matrix residual = u - u0 * (u0.transpose() * u);
  const Vector sines = Eigen::JacobiSVD<Matrix>(residual).singularValues();
  const Eigen::Index r = cosines.size();
  SinThetaResult out;
  out.angles.resize(r);
  double max_sin = 0.0;
  double sum_sq = 0.0;
  for (Eigen::Index k = 0; k < r; ++k) {
    const double c = std::clamp(cosines(k), 0.0, 1.0);
    const double sn = std::clamp(sines(r - 1 - k), 0.0, 1.0);
    out.angles(k) = std::atan2(sn, c);
    max_sin = std::max(max_sin, sn);
    sum_sq += sn * sn;
  }
  out.dist_spectral = max_sin;
  out.dist_frobenius = std::sqrt(sum_sq);
  return out;
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

double min_singular_value(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const Vector s = Eigen::JacobiSVD<Matrix>(m).singularValues();
  return s(s.size() - 1);
}

Matrix symmetrize(const Matrix& s) { return 0.5 * (s + s.transpose()); }

Matrix sym_sqrt(const Matrix& s) {
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(s));
  const Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

Matrix sym_inv_sqrt(const Matrix& s) {
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(s));
  require(eig.eigenvalues().minCoeff() > 0.0, ErrorCode::NotPositiveDefinite,
          "sym_inv_sqrt: matrix is not positive definite");
  const Vector root = eig.eigenvalues().cwiseSqrt().cwiseInverse();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

Matrix identity_frame(Eigen::Index p, Eigen::Index r) { return Matrix::Identity(p, r); }

}  // namespace lowrank
