#pragma once

#include <optional>

#include "lowrank/cayley.hpp"

namespace lowrank {

// theta = (phi, mu) for Sigma = U(phi) M U(phi)^T with M = unvech(mu).
class ThetaSym {
 public:
  ThetaSym(Phi phi, Vector mu);
  static ThetaSym from_vector(Eigen::Index p, Eigen::Index r, const Vector& theta);

  Eigen::Index p() const { return phi_.p(); }
  Eigen::Index r() const { return phi_.r(); }
  Eigen::Index dim() const { return phi_.size() + mu_.size(); }
  const Phi& phi() const { return phi_; }
  const Vector& mu() const { return mu_; }
  Matrix m() const { return unvech(mu_, r()); }
  // (phi, mu) stacked.
  Vector vector() const;

 private:
  Phi phi_;
  Vector mu_;
};

Eigen::Index sym_dim(Eigen::Index p, Eigen::Index r);

Matrix sigma_of_theta(const ThetaSym& theta);
ThetaSym theta_of_sigma(const Matrix& sigma, Eigen::Index r);
// p^2 x d matrix [D_phi Sigma | D_mu Sigma].
Matrix dsigma(const ThetaSym& theta);

// Eigenvalues of a symmetric matrix sorted by decreasing magnitude.
Vector eigenvalues_by_magnitude(const Matrix& s);

Certificate taylor_certificate_sym(const ThetaSym& theta, const ThetaSym& theta0);
std::optional<Certificate> inverse_perturbation_certificate(const ThetaSym& theta, const ThetaSym& theta0);

struct SubspaceCertificates {
  Certificate c1;  // ||sin Theta||_F <= 4 ||phi - phi0||
  Certificate c2;  // ||sin Theta||_F <= sqrt(2) ||U - U0||_F
  std::optional<Certificate> c3;  // ||phi - phi0|| <= c ||sin Theta||_F near phi0
  std::optional<Certificate> frame;  // ||U - U0||_F <= c' ||sin Theta||_F near phi0
};

SubspaceCertificates subspace_equivalence_certificates(const Phi& phi, const Phi& phi0);

struct RegularityRecord {
  double sigma_min_observed = 0.0;
  double sigma_min_bound = 0.0;
  double inv_gram_norm_observed = 0.0;
  double inv_gram_norm_bound = 0.0;
  // Absent when p = r and the phi block is empty.
  std::optional<Certificate> sigma_min;
  Certificate inv_gram;
};

RegularityRecord regularity_bounds(const ThetaSym& theta0);

}  // namespace lowrank
