#include "lowrank/eigs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "lowrank/errors.hpp"
#include "lowrank/rng.hpp"

namespace lowrank {

namespace {

constexpr Eigen::Index kDenseCutoff = 96;
constexpr Eigen::Index kOversample = 8;
constexpr int kMaxIterations = 1000;
constexpr double kResidualTolerance = 1e-11;

Matrix random_block(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Philox4x32 rng(seed, 0x5eed);
  Matrix x(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) x(i, j) = rng.normal();
  return x;
}

Matrix orthonormalize(const Matrix& x) {
  const Eigen::HouseholderQR<Matrix> qr(x);
  return qr.householderQ() * Matrix::Identity(x.rows(), x.cols());
}

std::vector<Eigen::Index> order_by_magnitude(const Vector& values) {
  std::vector<Eigen::Index> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(values(a)) > std::abs(values(b));
  });
  return order;
}

void fix_signs(Matrix& vectors, Matrix* paired = nullptr) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index idx;
    vectors.col(j).cwiseAbs().maxCoeff(&idx);
    if (vectors(idx, j) < 0.0) {
      vectors.col(j) *= -1.0;
      if (paired != nullptr) paired->col(j) *= -1.0;
    }
  }
}

EigenPairs select(const Vector& values, const Matrix& vectors, Eigen::Index r) {
  const auto order = order_by_magnitude(values);
  EigenPairs out;
  out.values.resize(r);
  out.vectors.resize(vectors.rows(), r);
  for (Eigen::Index k = 0; k < r; ++k) {
    out.values(k) = values(order[k]);
    out.vectors.col(k) = vectors.col(order[k]);
  }
  fix_signs(out.vectors);
  return out;
}

}  // namespace

EigenPairs leading_eigenpairs(const Matrix& s, Eigen::Index r, std::uint64_t seed) {
  const Eigen::Index n = s.rows();
  require(s.cols() == n, ErrorCode::DimensionMismatch, "leading_eigenpairs: matrix is not square");
  require(r >= 0 && r <= n, ErrorCode::DimensionMismatch, "leading_eigenpairs: r out of range");
  if (n <= kDenseCutoff || r + kOversample >= n) {
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(s));
    return select(eig.eigenvalues(), eig.eigenvectors(), r);
  }

  const Eigen::Index b = r + kOversample;
  Matrix q = orthonormalize(random_block(n, b, seed));
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff() * static_cast<double>(n));
  Vector values;
  Matrix ritz;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    const Matrix y = s * q;
    const Matrix t = symmetrize(q.transpose() * y);
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(t);
    const auto order = order_by_magnitude(eig.eigenvalues());
    Matrix basis(b, b);
    values.resize(b);
    for (Eigen::Index k = 0; k < b; ++k) {
      basis.col(k) = eig.eigenvectors().col(order[k]);
      values(k) = eig.eigenvalues()(order[k]);
    }
    ritz = q * basis;
    const Matrix image = y * basis;
    double worst = 0.0;
    for (Eigen::Index k = 0; k < r; ++k)
      worst = std::max(worst, (image.col(k) - values(k) * ritz.col(k)).norm());
    if (worst <= kResidualTolerance * scale) break;
    q = orthonormalize(image);
  }
  EigenPairs out;
  out.values = values.head(r);
  out.vectors = ritz.leftCols(r);
  fix_signs(out.vectors);
  return out;
}

SingularTriplets leading_singular_triplets(const Matrix& y, Eigen::Index r, std::uint64_t seed) {
  const Eigen::Index m = y.rows();
  const Eigen::Index n = y.cols();
  require(r >= 0 && r <= std::min(m, n), ErrorCode::DimensionMismatch,
          "leading_singular_triplets: r out of range");
  SingularTriplets out;
  if (std::min(m, n) <= kDenseCutoff || r + kOversample >= std::min(m, n)) {
    const Eigen::BDCSVD<Matrix> svd(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.values = svd.singularValues().head(r);
    out.left = svd.matrixU().leftCols(r);
    out.right = svd.matrixV().leftCols(r);
    fix_signs(out.right, &out.left);
    return out;
  }

  const Eigen::Index b = r + kOversample;
  Matrix q = orthonormalize(random_block(n, b, seed));
  const double scale = std::max(1.0, y.cwiseAbs().maxCoeff() * static_cast<double>(std::max(m, n)));
  Matrix left;
  Matrix right;
  Vector sigma;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    const Matrix image = y * q;  // m x b
    const Eigen::JacobiSVD<Matrix> small(image, Eigen::ComputeThinU | Eigen::ComputeThinV);
    sigma = small.singularValues();
    right = q * small.matrixV();
    left = small.matrixU();
    const Matrix back = y.transpose() * left;  // approximately right * diag(sigma)
    double worst = 0.0;
    for (Eigen::Index k = 0; k < r; ++k)
      worst = std::max(worst, (back.col(k) - sigma(k) * right.col(k)).norm());
    if (worst <= kResidualTolerance * scale) break;
    q = orthonormalize(back);
  }
  out.values = sigma.head(r);
  out.left = left.leftCols(r);
  out.right = right.leftCols(r);
  fix_signs(out.right, &out.left);
  return out;
}

}  // namespace lowrank
