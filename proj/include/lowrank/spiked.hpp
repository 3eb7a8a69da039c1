#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "lowrank/symrep.hpp"

namespace lowrank {

struct SpikedModel {
  ThetaSym theta0;
  int n = 1;
  std::vector<int> support0;  // sorted row indices of A0 in [0, p - r)

  SpikedModel(ThetaSym theta0, int n, std::vector<int> support0);
  Eigen::Index p() const { return theta0.p(); }
  Eigen::Index r() const { return theta0.r(); }
};

Matrix omega_of_theta(const ThetaSym& theta);

struct GaussianSample {
  Matrix data;       // p x n, one observation per column
  Matrix omega_hat;  // data data^T / n
};

GaussianSample sample_gaussian(const Matrix& omega, int n, std::uint64_t seed, std::uint64_t stream = 0);

double log_likelihood(const Matrix& omega, const Matrix& omega_hat, int n);
Matrix fisher_spiked(const ThetaSym& theta0);

// log of the support-size prior n^{-rt} (p-r)^{-at} / z_n for t = 0..p-r.
double log_support_size_prior(int t, Eigen::Index p, Eigen::Index r, double a, int n);

// Prior log density of theta restricted to support S, omitting -log gamma(|S|).
double prior_log_density(const ThetaSym& theta, const std::vector<int>& support, double a, int n);

struct GammaBounds {
  double lower = 0.0;
  double upper = 1.0;
};

GammaBounds gamma_bounds(int support_size, Eigen::Index r);

struct GammaEstimate {
  double value = 1.0;
  double std_error = 0.0;
  int draws = 0;
};

// Monte Carlo estimates of P(||A_S||_2 < 1) for iid Laplace entries with
// density exp(-2|x|), cached per (|S|, r). Thread-safe.
class GammaTable {
 public:
  explicit GammaTable(std::uint64_t seed = 0x6a33a, int draws = 100000);
  GammaEstimate get(int support_size, Eigen::Index r);

 private:
  std::uint64_t seed_;
  int draws_;
  std::mutex mutex_;
  std::map<std::pair<int, Eigen::Index>, GammaEstimate> cache_;
};

struct GammaCertificates {
  Certificate lower;
  Certificate upper;
};

GammaCertificates gamma_bounds_certificate(const GammaEstimate& estimate, int support_size, Eigen::Index r);

// Full-parameter coordinates kept by a support: the phi entries of rows in S
// (for every column of A) followed by all mu entries.
std::vector<Eigen::Index> support_coordinates(Eigen::Index p, Eigen::Index r, const std::vector<int>& support);
// d x d_S selector F_S with theta_S = F_S^T theta.
Matrix support_selector(Eigen::Index p, Eigen::Index r, const std::vector<int>& support);

struct LimitComponent {
  std::vector<int> support;
  std::vector<Eigen::Index> coordinates;
  double log_weight = 0.0;  // unnormalized
  double weight = 0.0;
  Vector mean;        // theta_hat_S
  Matrix information; // n F_S^T I(theta0) F_S
  Matrix covariance;  // inverse of information
};

struct LimitPosterior {
  Eigen::Index p = 0;
  Eigen::Index r = 0;
  Vector theta0;
  std::vector<LimitComponent> components;
};

struct LimitPosteriorOptions {
  int cap = 0;
  double a = 1.0;
};

inline constexpr std::size_t kMaxSupportEnumeration = 100000;

LimitPosterior limit_posterior(const Matrix& omega_hat, const SpikedModel& model, const LimitPosteriorOptions& options,
                               GammaTable& gamma);

std::vector<Vector> sample_limit_posterior(const LimitPosterior& lp, int draws, std::uint64_t seed);

double lan_remainder(const ThetaSym& theta, const ThetaSym& theta0, const Matrix& omega_hat, int n);

// Fraction of draws whose frame U(phi) satisfies
// ||sin Theta(U(phi), U0)||_2 > m_const sqrt(s log p / n). Draws outside the
// chart domain count as exceedances.
double sin_theta_tail(const std::vector<Vector>& draws, const Matrix& u0, double m_const, int s, Eigen::Index p,
                      int n);

struct SpikedStudyConfig {
  ThetaSym theta0;
  std::vector<int> support0;
  std::vector<int> tail_n_values;
  std::vector<int> lan_n_values;
  int datasets = 0;
  int draws = 1000;
  int cap = 0;
  double a = 1.0;
  double m_const = 1.0;
  std::uint64_t seed = 0;
};

struct SpikedTailRecord {
  int n = 0;
  int dataset = 0;
  int components = 0;
  double weight_sum = 0.0;
  double weight_true_support = 0.0;
  double tail_fraction = 0.0;
};

// |R_n| at theta0 + delta with a random unit direction scaled to 1/sqrt(n).
struct LanRecord {
  int n = 0;
  int dataset = 0;
  double abs_remainder = 0.0;
};

struct SpikedStudyResult {
  std::vector<SpikedTailRecord> tail;  // grouped by n, dataset order within
  std::vector<LanRecord> lan;
};

SpikedStudyResult spiked_study(const SpikedStudyConfig& config, GammaTable& gamma);

}  // namespace lowrank
