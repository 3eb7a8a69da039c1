#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lowrank/cluster.hpp"
#include "lowrank/montecarlo.hpp"
#include "lowrank/rectrep.hpp"

namespace lowrank {

enum class NoiseFamily { Gaussian, Uniform, Rademacher };

struct Separation {
  double rows = 0.0;
  double cols = 0.0;
};

// Minimum pairwise row distances of W1 D^{1/2} and W2 D^{1/2} from the
// rank-r SVD of sigma0 = W1 D W2^T.
Separation separation(const Matrix& sigma0, int r);

struct BiclusterModel {
  Matrix sigma0;  // p1 x p2 block means
  ClusterAssignment tau0;
  ClusterAssignment gamma0;
  double sigma2 = 1.0;
  Vector w;
  Vector pi;
  int r = 1;
  NoiseFamily noise = NoiseFamily::Gaussian;
  std::vector<std::string> warnings;

  BiclusterModel(Matrix sigma0, ClusterAssignment tau0, ClusterAssignment gamma0, double sigma2, Vector w, Vector pi,
                 int r, NoiseFamily noise = NoiseFamily::Gaussian, double separation_threshold = 1e-3);
  int p1() const { return static_cast<int>(sigma0.rows()); }
  int p2() const { return static_cast<int>(sigma0.cols()); }
};

Matrix sample_data(const BiclusterModel& model, std::uint64_t seed, std::uint64_t stream = 0);
std::pair<ClusterAssignment, ClusterAssignment> spectral_cocluster(const Matrix& y, int r, int p1, int p2,
                                                                   std::uint64_t seed,
                                                                   const KmeansOptions& options = {});
Matrix block_means(const Matrix& y, const ClusterAssignment& tau, const ClusterAssignment& gamma);

struct RectFit {
  ThetaRect theta;
  // Sigma(theta) approximates sigma_hat(:, column_permutation).
  std::vector<int> column_permutation;
  int iterations = 0;
  double gradient_norm = 0.0;
  double objective = 0.0;
  double initial_objective = 0.0;
};

RectFit lse_theta(const Matrix& sigma_hat, int r);

// How the block sizes enter the middle factor of the sandwich covariance.
// Reciprocal uses sigma^2 / (w_s pi_t), the variance of sqrt(mn) times a block
// mean over a block holding a w_s pi_t share of the entries. Proportional
// uses sigma^2 w_s pi_t.
enum class BlockWeighting { Reciprocal, Proportional };

// row_permutation[s] / col_permutation[t] give the estimated label of true
// row class s / column class t.
Matrix asymptotic_cov_G(const ThetaRect& theta, const Vector& w, const Vector& pi, double sigma2,
                        const std::vector<int>& row_permutation, const std::vector<int>& col_permutation,
                        BlockWeighting weighting = BlockWeighting::Reciprocal);

struct BiclusterExperimentConfig {
  Matrix sigma0;
  int r = 1;
  Vector w;
  Vector pi;
  double sigma2 = 1.0;
  NoiseFamily noise = NoiseFamily::Gaussian;
  std::vector<std::pair<int, int>> sizes;  // (m, n)
  int replicates = 0;
  std::uint64_t seed = 0;
  KmeansOptions kmeans;
  BlockWeighting weighting = BlockWeighting::Reciprocal;
};

ExperimentResult bicluster_experiment(const BiclusterExperimentConfig& config);

}  // namespace lowrank
