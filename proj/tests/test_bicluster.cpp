#include <gtest/gtest.h>

#include <cmath>

#include "lowrank/battery.hpp"
#include "lowrank/bicluster.hpp"
#include "lowrank/errors.hpp"
#include "test_support.hpp"

using namespace lowrank;
using lowrank::testing::relative_error;

namespace {

Matrix three_by_three() { return (Matrix(3, 3) << 1, 0, 1, 0, 1, 1, 1, 1, 2).finished(); }

BiclusterModel uniform_model(const Matrix& sigma0, int r, int m, int n, double sigma2,
                             NoiseFamily noise = NoiseFamily::Gaussian) {
  const Vector w = Vector::Constant(sigma0.rows(), 1.0 / static_cast<double>(sigma0.rows()));
  const Vector pi = Vector::Constant(sigma0.cols(), 1.0 / static_cast<double>(sigma0.cols()));
  return BiclusterModel(sigma0, balanced_assignment(m, w), balanced_assignment(n, pi), sigma2, w, pi, r, noise);
}

Matrix expand(const BiclusterModel& model) {
  Matrix y(static_cast<Eigen::Index>(model.tau0.size()), static_cast<Eigen::Index>(model.gamma0.size()));
  for (Eigen::Index j = 0; j < y.cols(); ++j)
    for (Eigen::Index i = 0; i < y.rows(); ++i) y(i, j) = model.sigma0(model.tau0.labels[i], model.gamma0.labels[j]);
  return y;
}

}  // namespace

TEST(BiclusterModel, ValidatesRankAndWarnsOnSeparation) {
  EXPECT_THROW(uniform_model(three_by_three(), 3, 30, 30, 1.0), Error);
  const Matrix duplicate_rows = (Matrix(2, 2) << 1, 2, 1, 2).finished();
  const BiclusterModel model = uniform_model(duplicate_rows, 1, 20, 20, 1.0);
  EXPECT_FALSE(model.warnings.empty());
  EXPECT_TRUE(uniform_model(three_by_three(), 2, 30, 30, 1.0).warnings.empty());
}

TEST(SampleData, NoiselessIsBlockMatrix) {
  const BiclusterModel model = uniform_model(three_by_three(), 2, 30, 24, 0.0);
  EXPECT_EQ(sample_data(model, 1), expand(model));
}

TEST(SampleData, DeterministicPerSeed) {
  const BiclusterModel model = uniform_model(three_by_three(), 2, 30, 24, 1.0);
  EXPECT_EQ(sample_data(model, 2), sample_data(model, 2));
  EXPECT_NE(sample_data(model, 2), sample_data(model, 3));
}

TEST(SampleData, BlockMeanAndVarianceMoments) {
  for (const auto family : {NoiseFamily::Gaussian, NoiseFamily::Uniform, NoiseFamily::Rademacher}) {
    const BiclusterModel model = uniform_model(three_by_three(), 2, 400, 400, 2.0, family);
    const Matrix y = sample_data(model, 4);
    const Matrix resid = y - expand(model);
    const double var = resid.squaredNorm() / static_cast<double>(resid.size());
    EXPECT_NEAR(var, 2.0, 0.2);
    const Matrix means = block_means(y, model.tau0, model.gamma0);
    const double block = (400.0 / 3.0) * (400.0 / 3.0);
    for (int s = 0; s < 3; ++s)
      for (int t = 0; t < 3; ++t) EXPECT_NEAR(means(s, t), three_by_three()(s, t), 4.0 * std::sqrt(2.0 / block) * 1.01);
  }
}

TEST(SampleData, RelabeledGeneratorGivesSameData) {
  const BiclusterModel model = uniform_model(three_by_three(), 2, 30, 30, 1.0);
  const std::vector<int> rp = {1, 2, 0};
  const std::vector<int> cp = {2, 0, 1};
  std::vector<int> rows = model.tau0.labels;
  std::vector<int> cols = model.gamma0.labels;
  for (int& l : rows) l = rp[static_cast<std::size_t>(l)];
  for (int& l : cols) l = cp[static_cast<std::size_t>(l)];
  Matrix sigma_perm(3, 3);
  for (int s = 0; s < 3; ++s)
    for (int t = 0; t < 3; ++t) sigma_perm(rp[s], cp[t]) = three_by_three()(s, t);
  const BiclusterModel permuted(sigma_perm, ClusterAssignment(rows, 3), ClusterAssignment(cols, 3), 1.0, model.w,
                                model.pi, 2);
  const Matrix y = sample_data(model, 5);
  EXPECT_EQ(y, sample_data(permuted, 5));
  const Matrix m0 = block_means(y, model.tau0, model.gamma0);
  const Matrix m1 = block_means(y, permuted.tau0, permuted.gamma0);
  for (int s = 0; s < 3; ++s)
    for (int t = 0; t < 3; ++t) EXPECT_NEAR(m1(rp[s], cp[t]), m0(s, t), 1e-14);
}

TEST(SpectralCocluster, NoiselessAndSingleBlock) {
  const BiclusterModel model = uniform_model(three_by_three(), 2, 60, 45, 0.0);
  const auto [rows, cols] = spectral_cocluster(sample_data(model, 1), 2, 3, 3, 2);
  EXPECT_EQ(align_labels(rows, model.tau0).hamming, 0);
  EXPECT_EQ(align_labels(cols, model.gamma0).hamming, 0);

  const BiclusterModel single = uniform_model(Matrix::Constant(1, 1, 2.0), 1, 20, 20, 1.0);
  const auto [r1, c1] = spectral_cocluster(sample_data(single, 1), 1, 1, 1, 2);
  for (int l : r1.labels) EXPECT_EQ(l, 0);
  for (int l : c1.labels) EXPECT_EQ(l, 0);
}

TEST(SpectralCocluster, ConsistencyAtModerateSize) {
  const BiclusterModel model = uniform_model(three_by_three(), 2, 400, 400, 1.0);
  int exact = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto [rows, cols] = spectral_cocluster(sample_data(model, 500 + rep), 2, 3, 3, rep);
    exact += align_labels(rows, model.tau0).hamming == 0 && align_labels(cols, model.gamma0).hamming == 0;
  }
  EXPECT_GE(exact, 95);
}

TEST(BlockMeans, ConstantAndEmpty) {
  const Matrix y = Matrix::Constant(6, 4, 1.5);
  const ClusterAssignment rows({0, 1, 0, 1, 0, 1}, 2);
  const ClusterAssignment cols({0, 1, 1, 0}, 2);
  EXPECT_EQ(block_means(y, rows, cols), Matrix::Constant(2, 2, 1.5));
  try {
    block_means(y, ClusterAssignment({0, 0, 0, 0, 0, 0}, 2), cols);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyBlock);
  }
}

TEST(LseTheta, ExactNoisyAndStationary) {
  Philox4x32 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const ThetaRect t = random_theta_rect(3, 4, 2, rng);
    const RectFit exact = lse_theta(sigma_of_theta_rect(t), 2);
    EXPECT_EQ(exact.column_permutation, (std::vector<int>{0, 1, 2, 3}));
    EXPECT_LE((exact.theta.vector() - t.vector()).norm(), 1e-8 * t.vector().norm());

    const Matrix target = sigma_of_theta_rect(t) + 1e-3 * lowrank::testing::random_matrix(3, 4, rng);
    const RectFit fit = lse_theta(target, 2);
    Matrix permuted(3, 4);
    for (int j = 0; j < 4; ++j) permuted.col(j) = target.col(fit.column_permutation[static_cast<std::size_t>(j)]);
    const Vector residual = vec(permuted - sigma_of_theta_rect(fit.theta));
    EXPECT_LE(residual.squaredNorm() * 0.5, fit.initial_objective + 1e-15);
    EXPECT_LE(residual.norm(), (target - sigma_of_theta_rect(t)).norm() + 1e-12);
    EXPECT_LE((dsigma_rect(fit.theta).transpose() * residual).norm(), 1e-8);
  }
}

TEST(AsymptoticCovG, UniformWeightsClosedForms) {
  Philox4x32 rng(7);
  const ThetaRect t = random_theta_rect(3, 3, 2, rng);
  const Vector w = Vector::Constant(3, 1.0 / 3.0);
  const Matrix jac = dsigma_rect(t);
  const Matrix gram_inv = (jac.transpose() * jac).inverse();
  const std::vector<int> id = {0, 1, 2};
  const Matrix prop = asymptotic_cov_G(t, w, w, 2.0, id, id, BlockWeighting::Proportional);
  EXPECT_LE(relative_error(prop, (2.0 / 9.0) * gram_inv), 1e-10);
  const Matrix recip = asymptotic_cov_G(t, w, w, 2.0, id, id, BlockWeighting::Reciprocal);
  EXPECT_LE(relative_error(recip, 2.0 * 9.0 * gram_inv), 1e-10);
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<Matrix>(recip).eigenvalues().minCoeff(), 0.0);
}

TEST(AsymptoticCovG, UniformWeightsPermutationInvariantSpectrum) {
  Philox4x32 rng(8);
  const ThetaRect t = random_theta_rect(3, 3, 2, rng);
  const Vector w = Vector::Constant(3, 1.0 / 3.0);
  const Vector a = Eigen::SelfAdjointEigenSolver<Matrix>(asymptotic_cov_G(t, w, w, 1.0, {0, 1, 2}, {0, 1, 2}))
                       .eigenvalues();
  const Vector b = Eigen::SelfAdjointEigenSolver<Matrix>(asymptotic_cov_G(t, w, w, 1.0, {2, 0, 1}, {1, 0, 2}))
                       .eigenvalues();
  EXPECT_LE((a - b).norm(), 1e-10 * a.norm());
}

TEST(AsymptoticCovG, ReciprocalMatchesSimulatedBlockMeans) {
  // Independent oracle: draw block means with variance sigma^2 / (m_s n_t)
  // directly, fit by least squares and compare the covariance of
  // sqrt(mn)(theta_hat - theta0) with G.
  const Matrix sigma0 = (Matrix(2, 3) << 1.0, 2.0, 0.5, 0.5, 1.0, 0.25).finished();
  const ThetaRect t0 = theta_of_sigma_rect(sigma0, 1);
  const Vector w = (Vector(2) << 0.6, 0.4).finished();
  const Vector pi = (Vector(3) << 0.2, 0.3, 0.5).finished();
  const double sigma2 = 1.5;
  const double m = 4000.0;
  const double n = 3000.0;
  Philox4x32 rng(9);
  const int draws = 4000;
  Matrix z(draws, t0.dim());
  for (int k = 0; k < draws; ++k) {
    Matrix noisy = sigma0;
    for (int s = 0; s < 2; ++s)
      for (int u = 0; u < 3; ++u) noisy(s, u) += std::sqrt(sigma2 / (m * w(s) * n * pi(u))) * rng.normal();
    const RectFit fit = lse_theta(noisy, 1);
    ASSERT_EQ(fit.column_permutation, (std::vector<int>{0, 1, 2}));
    z.row(k) = std::sqrt(m * n) * (fit.theta.vector() - t0.vector()).transpose();
  }
  const Matrix centered = z.rowwise() - z.colwise().mean();
  const Matrix cov = centered.transpose() * centered / (draws - 1.0);
  const Matrix g = asymptotic_cov_G(t0, w, pi, sigma2, {0, 1}, {0, 1, 2});
  const Matrix whitened = sym_inv_sqrt(g) * cov * sym_inv_sqrt(g);
  EXPECT_LE(spectral_norm(whitened - Matrix::Identity(t0.dim(), t0.dim())), 0.15);
}

TEST(BiclusterExperiment, ZeroReplicatesAndDeterminism) {
  BiclusterExperimentConfig cfg;
  cfg.sigma0 = three_by_three();
  cfg.r = 2;
  cfg.w = Vector::Constant(3, 1.0 / 3.0);
  cfg.pi = cfg.w;
  cfg.sizes = {{120, 150}};
  cfg.replicates = 0;
  EXPECT_TRUE(bicluster_experiment(cfg).rows.empty());
  cfg.replicates = 4;
  cfg.seed = 3;
  const ExperimentResult a = bicluster_experiment(cfg);
  const ExperimentResult b = bicluster_experiment(cfg);
  ASSERT_EQ(a.rows.size(), 4u);
  EXPECT_EQ(a.d, 8);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(a.rows[i].m, 120);
    EXPECT_EQ(a.rows[i].n, 150);
    EXPECT_EQ(a.rows[i].z, b.rows[i].z);
  }
}
