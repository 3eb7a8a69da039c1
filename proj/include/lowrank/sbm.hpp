#pragma once

#include <cstdint>
#include <vector>

#include "lowrank/cluster.hpp"
#include "lowrank/montecarlo.hpp"
#include "lowrank/symrep.hpp"

namespace lowrank {

struct SbmModel {
  Matrix sigma0;  // K x K block probabilities
  ClusterAssignment tau0;
  int r = 1;
  Vector pi;  // limiting class proportions

  SbmModel(Matrix sigma0, ClusterAssignment tau0, int r, Vector pi);
  int K() const { return static_cast<int>(sigma0.rows()); }
  int n() const { return static_cast<int>(tau0.size()); }
};

// Symmetric 0/1 matrix with zero diagonal.
using Adjacency = Matrix;

// Edge and pair counts over node pairs i < j with (tau(i), tau(j)) = (s, t).
struct BlockCounts {
  Matrix edges;
  Matrix pairs;
};

Adjacency sample_adjacency(const SbmModel& model, std::uint64_t seed, std::uint64_t stream = 0);
ClusterAssignment spectral_cluster_sbm(const Adjacency& a, int r, int K, std::uint64_t seed,
                                       const KmeansOptions& options = {});
BlockCounts block_counts(const Adjacency& a, const ClusterAssignment& tau);
// Entry (s, t) is the edge fraction over ordered pairs i != j with labels
// (s, t) or (t, s).
Matrix block_mean_estimator(const Adjacency& a, const ClusterAssignment& tau);
Matrix clip_probabilities(const Matrix& sigma, double eps = 1e-4);

struct ManifoldFit {
  ThetaSym theta;
  // Sigma(theta) approximates sigma_tilde(permutation, permutation): row i of
  // the fitted matrix corresponds to row permutation[i] of the input.
  std::vector<int> permutation;
  int iterations = 0;
  double gradient_norm = 0.0;
  double objective = 0.0;
};

ManifoldFit project_to_manifold(const Matrix& sigma_tilde, int r);

double sbm_log_likelihood(const ThetaSym& theta, const BlockCounts& counts);
Vector sbm_score(const ThetaSym& theta, const BlockCounts& counts);
Vector sbm_score(const ThetaSym& theta, const ClusterAssignment& tau, const Adjacency& a);
Matrix sbm_fisher(const ThetaSym& theta, const BlockCounts& counts);
Matrix sbm_fisher(const ThetaSym& theta, const ClusterAssignment& tau);
// Newton/Fisher-scoring ascent: theta + I^{-1} score.
ThetaSym one_step(const ThetaSym& theta_tilde, const BlockCounts& counts);
ThetaSym one_step(const ThetaSym& theta_tilde, const ClusterAssignment& tau_hat, const Adjacency& a);

// permutation[t] is the estimated label of true class t, so the permuted
// proportion vector has entry pi_t at position permutation[t].
Matrix asymptotic_cov_J(const ThetaSym& theta, const Vector& pi, const std::vector<int>& permutation);

struct SbmExperimentConfig {
  Matrix sigma0;
  int r = 1;
  Vector pi;
  std::vector<int> n_values;
  int replicates = 0;
  std::uint64_t seed = 0;
  KmeansOptions kmeans;
};

ExperimentResult sbm_experiment(const SbmExperimentConfig& config);

// Permutes rows and columns: out(i, j) = s(perm[i], perm[j]).
Matrix permute_symmetric(const Matrix& s, const std::vector<int>& perm);

}  // namespace lowrank
