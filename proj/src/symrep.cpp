#include "lowrank/symrep.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "lowrank/errors.hpp"

namespace lowrank {

namespace {

constexpr double kRankTolerance = 1e-9;
constexpr double kTopBlockTolerance = 1e-8;

std::vector<Eigen::Index> magnitude_order(const Vector& values) {
  std::vector<Eigen::Index> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(values(a)) > std::abs(values(b));
  });
  return order;
}

double a_squared(const Phi& phi) { return phi.norm() * phi.norm(); }

}  // namespace

Eigen::Index sym_dim(Eigen::Index p, Eigen::Index r) { return (p - r) * r + vech_length(r); }

ThetaSym::ThetaSym(Phi phi, Vector mu) : phi_(std::move(phi)), mu_(std::move(mu)) {
  require(mu_.size() == vech_length(phi_.r()), ErrorCode::DimensionMismatch, "ThetaSym: mu must have length r(r+1)/2");
}

ThetaSym ThetaSym::from_vector(Eigen::Index p, Eigen::Index r, const Vector& theta) {
  require(theta.size() == sym_dim(p, r), ErrorCode::DimensionMismatch, "ThetaSym: wrong parameter length");
  const Eigen::Index k = (p - r) * r;
  return ThetaSym(Phi(p, r, theta.head(k)), theta.tail(theta.size() - k));
}

Vector ThetaSym::vector() const {
  Vector out(dim());
  out << phi_.values(), mu_;
  return out;
}

Matrix sigma_of_theta(const ThetaSym& theta) {
  const Matrix u = cayley_map(theta.phi()).matrix();
  return symmetrize(u * theta.m() * u.transpose());
}

Vector eigenvalues_by_magnitude(const Matrix& s) {
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(s), Eigen::EigenvaluesOnly);
  const auto order = magnitude_order(eig.eigenvalues());
  Vector out(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) out(k) = eig.eigenvalues()(order[k]);
  return out;
}

ThetaSym theta_of_sigma(const Matrix& sigma, Eigen::Index r) {
  const Eigen::Index p = sigma.rows();
  require(sigma.cols() == p, ErrorCode::DimensionMismatch, "theta_of_sigma: matrix is not square");
  require(r >= 1 && r <= p, ErrorCode::DimensionMismatch, "theta_of_sigma: need 1 <= r <= p");
  require(is_symmetric(sigma), ErrorCode::AsymmetricInput, "theta_of_sigma: matrix is not symmetric");
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(sigma));
  const auto order = magnitude_order(eig.eigenvalues());
  const double top = std::abs(eig.eigenvalues()(order[0]));
  const double threshold = kRankTolerance * top;
  Eigen::Index rank = 0;
  for (auto idx : order)
    if (std::abs(eig.eigenvalues()(idx)) > threshold) ++rank;
  require(top > 0.0 && rank == r, ErrorCode::RankMismatch,
          "theta_of_sigma: numerical rank " + std::to_string(rank) + " differs from r=" + std::to_string(r));
  if (r < p) {
    const double lr = std::abs(eig.eigenvalues()(order[r - 1]));
    const double lnext = std::abs(eig.eigenvalues()(order[r]));
    require(lr - lnext > threshold, ErrorCode::RankMismatch, "theta_of_sigma: eigenvalue tie at position r");
  }
  Matrix v(p, r);
  for (Eigen::Index k = 0; k < r; ++k) v.col(k) = eig.eigenvectors().col(order[k]);

  const Eigen::JacobiSVD<Matrix> svd(v.topRows(r), Eigen::ComputeFullU | Eigen::ComputeFullV);
  require(svd.singularValues()(r - 1) >= kTopBlockTolerance, ErrorCode::DegenerateTopBlock,
          "theta_of_sigma: top block of the eigenvector frame is singular");
  Matrix u = v * svd.matrixV() * svd.matrixU().transpose();
  u.topRows(r) = symmetrize(u.topRows(r));
  const StiefelPlus frame(u);
  Phi phi = cayley_inverse(frame);
  const Matrix uc = cayley_map(phi).matrix();
  const Matrix m = symmetrize(uc.transpose() * sigma * uc);
  return ThetaSym(std::move(phi), vech(m));
}

Matrix dsigma(const ThetaSym& theta) {
  const Eigen::Index p = theta.p();
  const Eigen::Index r = theta.r();
  const Matrix u = cayley_map(theta.phi()).matrix();
  const Matrix m = theta.m();
  const Matrix ip = Matrix::Identity(p, p);
  const Matrix sym_part = Matrix::Identity(p * p, p * p) + commutation_matrix(p, p);
  Matrix out(p * p, theta.dim());
  out.leftCols(theta.phi().size()) = sym_part * kron(u * m, ip) * cayley_jacobian(theta.phi());
  out.rightCols(vech_length(r)) = kron(u, u) * duplication_matrix(r);
  return out;
}

Certificate taylor_certificate_sym(const ThetaSym& theta, const ThetaSym& theta0) {
  require(theta.p() == theta0.p() && theta.r() == theta0.r(), ErrorCode::DimensionMismatch,
          "taylor_certificate_sym: dimensions differ");
  const Vector delta = theta.vector() - theta0.vector();
  const Vector remainder = vec(sigma_of_theta(theta)) - vec(sigma_of_theta(theta0)) - dsigma(theta0) * delta;
  const double bound = 16.0 * (1.0 + spectral_norm(theta0.m())) * delta.squaredNorm();
  return Certificate::at_most("symrep.taylor_remainder", remainder.norm(), bound);
}

std::optional<Certificate> inverse_perturbation_certificate(const ThetaSym& theta, const ThetaSym& theta0) {
  require(theta.p() == theta0.p() && theta.r() == theta0.r(), ErrorCode::DimensionMismatch,
          "inverse_perturbation_certificate: dimensions differ");
  const Vector ev0 = Eigen::SelfAdjointEigenSolver<Matrix>(theta0.m(), Eigen::EigenvaluesOnly).eigenvalues();
  const double evmin = Eigen::SelfAdjointEigenSolver<Matrix>(theta.m(), Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  require(ev0.minCoeff() > 0.0 && evmin > 0.0, ErrorCode::NotPositiveDefinite,
          "inverse_perturbation_certificate: M and M0 must be positive definite");
  const double lambda1 = ev0.maxCoeff();
  const double lambdar = ev0.minCoeff();
  const double a2 = a_squared(theta0.phi());
  const double gap = (sigma_of_theta(theta) - sigma_of_theta(theta0)).norm();
  const double gate = (1.0 - a2) * (1.0 - a2) * lambdar / (4.0 * std::numbers::sqrt2 * (1.0 + a2) * (1.0 + a2));
  if (gap > gate) return std::nullopt;
  const double factor = 1.0 + 16.0 * std::numbers::sqrt2 * (1.0 + lambda1) * (1.0 + a2) / (lambdar * (1.0 - a2));
  return Certificate::at_most("symrep.inverse_perturbation", (theta.vector() - theta0.vector()).norm(), factor * gap);
}

SubspaceCertificates subspace_equivalence_certificates(const Phi& phi, const Phi& phi0) {
  require(phi.p() == phi0.p() && phi.r() == phi0.r(), ErrorCode::DimensionMismatch,
          "subspace_equivalence_certificates: dimensions differ");
  const Matrix u = cayley_map(phi).matrix();
  const Matrix u0 = cayley_map(phi0).matrix();
  const double sin_f = sin_theta(u0, u).dist_frobenius;
  const double dphi = (phi.values() - phi0.values()).norm();
  const double du = (u - u0).norm();
  SubspaceCertificates out{
      Certificate::at_most("subspace.sin_theta_vs_phi", sin_f, 4.0 * dphi),
      Certificate::at_most("subspace.sin_theta_vs_frame", sin_f, std::numbers::sqrt2 * du),
      std::nullopt,
      std::nullopt,
  };
  const double a2 = a_squared(phi0);
  const double ratio = (1.0 + a2) * (1.0 + a2) / ((1.0 - a2) * (1.0 - a2));
  if (sin_f <= 1.0 / (8.0 * ratio)) {
    const double factor = 1.0 + 32.0 * std::numbers::sqrt2 * ratio;
    out.c3 = Certificate::at_most("subspace.phi_vs_sin_theta", dphi, std::numbers::sqrt2 * factor * sin_f);
    out.frame = Certificate::at_most("subspace.frame_vs_sin_theta", du, 4.0 * factor * sin_f);
  }
  return out;
}

RegularityRecord regularity_bounds(const ThetaSym& theta0) {
  const Eigen::Index r = theta0.r();
  const Eigen::Index d = theta0.dim();
  const Matrix m0 = theta0.m();
  const Vector sv = Eigen::JacobiSVD<Matrix>(m0).singularValues();
  const double sigma_r = sv(r - 1);
  require(sigma_r > 0.0, ErrorCode::SingularGram, "regularity_bounds: M0 is singular");
  const double m_norm = sv(0);
  const double a2 = a_squared(theta0.phi());

  const Matrix jac = dsigma(theta0);
  const Vector jac_sv = Eigen::JacobiSVD<Matrix>(jac).singularValues();
  const double smallest = jac_sv(d - 1);
  require(smallest > 1e-12 * std::max(1.0, jac_sv(0)), ErrorCode::SingularGram,
          "regularity_bounds: D Sigma is rank deficient");
  const Matrix gram = jac.transpose() * jac;
  const Matrix gram_inv = gram.ldlt().solve(Matrix::Identity(d, d));

  RegularityRecord rec;
  rec.inv_gram_norm_observed = spectral_norm(symmetrize(gram_inv));
  const double lead = 1.0 + 64.0 * m_norm * m_norm;
  if (r >= 2) {
    rec.sigma_min_bound = 2.0 * std::numbers::sqrt2 * sigma_r * (1.0 - a2) / ((1.0 + a2) * (1.0 + a2));
    rec.inv_gram_norm_bound = 1.0 + lead * std::pow(1.0 + a2, 4) / (8.0 * sigma_r * sigma_r * (1.0 - a2) * (1.0 - a2));
  } else {
    rec.sigma_min_bound = 2.0 * std::numbers::sqrt2 * sigma_r / (1.0 + a2);
    rec.inv_gram_norm_bound = 1.0 + lead * (1.0 + a2) * (1.0 + a2) / (8.0 * sigma_r * sigma_r);
  }
  if (theta0.phi().size() > 0) {
    rec.sigma_min_observed = min_singular_value(jac.leftCols(theta0.phi().size()));
    rec.sigma_min = Certificate::at_least("symrep.regularity_sigma_min", rec.sigma_min_observed, rec.sigma_min_bound);
  }
  rec.inv_gram = Certificate::at_most("symrep.regularity_inv_gram", rec.inv_gram_norm_observed, rec.inv_gram_norm_bound);
  return rec;
}

}  // namespace lowrank
