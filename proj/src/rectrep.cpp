#include "lowrank/rectrep.hpp"

#include <cmath>

#include "lowrank/errors.hpp"

namespace lowrank {

namespace {

constexpr double kRankTolerance = 1e-9;
constexpr double kTopBlockTolerance = 1e-8;

}  // namespace

Eigen::Index rect_dim(Eigen::Index p1, Eigen::Index p2, Eigen::Index r) { return (p2 - r) * r + p1 * r; }

ThetaRect::ThetaRect(Eigen::Index p1, Phi phi, Vector mu) : p1_(p1), phi_(std::move(phi)), mu_(std::move(mu)) {
  require(p1_ >= 1, ErrorCode::DimensionMismatch, "ThetaRect: p1 must be positive");
  require(mu_.size() == p1_ * phi_.r(), ErrorCode::DimensionMismatch, "ThetaRect: mu must have length p1 r");
}

ThetaRect ThetaRect::from_vector(Eigen::Index p1, Eigen::Index p2, Eigen::Index r, const Vector& theta) {
  require(theta.size() == rect_dim(p1, p2, r), ErrorCode::DimensionMismatch, "ThetaRect: wrong parameter length");
  const Eigen::Index k = (p2 - r) * r;
  return ThetaRect(p1, Phi(p2, r, theta.head(k)), theta.tail(theta.size() - k));
}

Vector ThetaRect::vector() const {
  Vector out(dim());
  out << phi_.values(), mu_;
  return out;
}

Matrix sigma_of_theta_rect(const ThetaRect& theta) {
  return theta.m() * cayley_map(theta.phi()).matrix().transpose();
}

ThetaRect theta_of_sigma_rect(const Matrix& sigma, Eigen::Index r) {
  const Eigen::Index p1 = sigma.rows();
  const Eigen::Index p2 = sigma.cols();
  require(r >= 1 && r <= p2, ErrorCode::DimensionMismatch, "theta_of_sigma_rect: need 1 <= r <= p2");
  const Eigen::JacobiSVD<Matrix> svd(sigma, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double threshold = kRankTolerance * (s.size() > 0 ? s(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > threshold) ++rank;
  require(s.size() > 0 && s(0) > 0.0 && rank == r, ErrorCode::RankMismatch,
          "theta_of_sigma_rect: numerical rank " + std::to_string(rank) + " differs from r=" + std::to_string(r));
  if (r < s.size())
    require(s(r - 1) - s(r) > threshold, ErrorCode::RankMismatch, "theta_of_sigma_rect: singular value tie at r");

  const Matrix v1 = svd.matrixU().leftCols(r);
  const Matrix v2 = svd.matrixV().leftCols(r);
  const Eigen::JacobiSVD<Matrix> top(v2.topRows(r), Eigen::ComputeFullU | Eigen::ComputeFullV);
  require(top.singularValues()(r - 1) >= kTopBlockTolerance, ErrorCode::DegenerateTopBlock,
          "theta_of_sigma_rect: top block of the right singular frame is singular");
  const Matrix rotation = top.matrixV() * top.matrixU().transpose();
  Matrix u = v2 * rotation;
  u.topRows(r) = symmetrize(u.topRows(r));
  Phi phi = cayley_inverse(StiefelPlus(u));
  const Matrix m = v1 * s.head(r).asDiagonal() * rotation;
  return ThetaRect(p1, std::move(phi), vec(m));
}

Matrix dsigma_rect(const ThetaRect& theta) {
  const Eigen::Index p1 = theta.p1();
  const Eigen::Index p2 = theta.p2();
  const Matrix u = cayley_map(theta.phi()).matrix();
  const Matrix m = theta.m();
  Matrix out(p1 * p2, theta.dim());
  out.leftCols(theta.phi().size()) =
      commutation_matrix(p2, p1) * kron(m, Matrix::Identity(p2, p2)) * cayley_jacobian(theta.phi());
  out.rightCols(theta.mu().size()) = kron(u, Matrix::Identity(p1, p1));
  return out;
}

Certificate taylor_certificate_rect(const ThetaRect& theta, const ThetaRect& theta0) {
  require(theta.p1() == theta0.p1() && theta.p2() == theta0.p2() && theta.r() == theta0.r(),
          ErrorCode::DimensionMismatch, "taylor_certificate_rect: dimensions differ");
  const Vector delta = theta.vector() - theta0.vector();
  const Vector remainder =
      vec(sigma_of_theta_rect(theta)) - vec(sigma_of_theta_rect(theta0)) - dsigma_rect(theta0) * delta;
  const double bound = (4.0 + 8.0 * spectral_norm(theta0.m())) * delta.squaredNorm();
  return Certificate::at_most("rectrep.taylor_remainder", remainder.norm(), bound);
}

RectRegularityRecord regularity_bound_rect(const ThetaRect& theta0) {
  const Eigen::Index r = theta0.r();
  const Eigen::Index d = theta0.dim();
  const Vector sv = Eigen::JacobiSVD<Matrix>(theta0.m()).singularValues();
  const double sigma_r = sv(r - 1);
  require(sigma_r > 0.0, ErrorCode::SingularGram, "regularity_bound_rect: M0 lacks full column rank");
  const double m_norm = sv(0);
  const double a2 = theta0.phi().norm() * theta0.phi().norm();

  const Matrix jac = dsigma_rect(theta0);
  const Vector jac_sv = Eigen::JacobiSVD<Matrix>(jac).singularValues();
  require(jac_sv(d - 1) > 1e-12 * std::max(1.0, jac_sv(0)), ErrorCode::SingularGram,
          "regularity_bound_rect: D Sigma is rank deficient");
  const Matrix gram = jac.transpose() * jac;
  const Matrix gram_inv = gram.ldlt().solve(Matrix::Identity(d, d));

  RectRegularityRecord rec;
  rec.inv_gram_norm_observed = spectral_norm(symmetrize(gram_inv));
  const double lead = 1.0 + 8.0 * m_norm * m_norm;
  if (r >= 2)
    rec.inv_gram_norm_bound = 1.0 + lead * std::pow(1.0 + a2, 4) / (4.0 * sigma_r * sigma_r * (1.0 - a2) * (1.0 - a2));
  else
    rec.inv_gram_norm_bound = 1.0 + lead * (1.0 + a2) * (1.0 + a2) / (4.0 * sigma_r * sigma_r);
  rec.inv_gram = Certificate::at_most("rectrep.regularity_inv_gram", rec.inv_gram_norm_observed, rec.inv_gram_norm_bound);
  return rec;
}

}  // namespace lowrank
