#pragma once

#include "lowrank/cayley.hpp"

namespace lowrank {

// theta = (phi, mu) for Sigma = M U(phi)^T with M = unvec(mu, p1, r) and
// U(phi) a p2 x r frame.
class ThetaRect {
 public:
  ThetaRect(Eigen::Index p1, Phi phi, Vector mu);
  static ThetaRect from_vector(Eigen::Index p1, Eigen::Index p2, Eigen::Index r, const Vector& theta);

  Eigen::Index p1() const { return p1_; }
  Eigen::Index p2() const { return phi_.p(); }
  Eigen::Index r() const { return phi_.r(); }
  Eigen::Index dim() const { return phi_.size() + mu_.size(); }
  const Phi& phi() const { return phi_; }
  const Vector& mu() const { return mu_; }
  Matrix m() const { return unvec(mu_, p1_, r()); }
  Vector vector() const;

 private:
  Eigen::Index p1_;
  Phi phi_;
  Vector mu_;
};

Eigen::Index rect_dim(Eigen::Index p1, Eigen::Index p2, Eigen::Index r);

Matrix sigma_of_theta_rect(const ThetaRect& theta);
ThetaRect theta_of_sigma_rect(const Matrix& sigma, Eigen::Index r);
// p1 p2 x d matrix [D_phi Sigma | D_mu Sigma].
Matrix dsigma_rect(const ThetaRect& theta);

Certificate taylor_certificate_rect(const ThetaRect& theta, const ThetaRect& theta0);

struct RectRegularityRecord {
  double inv_gram_norm_observed = 0.0;
  double inv_gram_norm_bound = 0.0;
  Certificate inv_gram;
};

RectRegularityRecord regularity_bound_rect(const ThetaRect& theta0);

}  // namespace lowrank
