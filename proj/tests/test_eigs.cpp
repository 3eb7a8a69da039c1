#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "lowrank/eigs.hpp"
#include "test_support.hpp"

using namespace lowrank;
using lowrank::testing::random_frame;
using lowrank::testing::random_matrix;

namespace {

Matrix planted_symmetric(Eigen::Index n, const Vector& spikes, Philox4x32& rng, double noise) {
  const Matrix v = random_frame(n, spikes.size(), rng);
  const Matrix e = random_matrix(n, n, rng);
  return v * spikes.asDiagonal() * v.transpose() + noise * (e + e.transpose());
}

}  // namespace

TEST(LeadingEigenpairs, DenseMatchesSelfAdjointSolver) {
  Philox4x32 rng(1);
  const Matrix a = random_matrix(20, 20, rng);
  const Matrix s = a + a.transpose();
  const auto pairs = leading_eigenpairs(s, 3);
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  std::vector<double> mags(es.eigenvalues().data(), es.eigenvalues().data() + 20);
  std::sort(mags.begin(), mags.end(), [](double x, double y) { return std::abs(x) > std::abs(y); });
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(pairs.values(i), mags[static_cast<std::size_t>(i)], 1e-10);
    EXPECT_LE((s * pairs.vectors.col(i) - pairs.values(i) * pairs.vectors.col(i)).norm(), 1e-9);
  }
}

TEST(LeadingEigenpairs, IterativeMatchesDense) {
  Philox4x32 rng(2);
  Vector spikes(3);
  spikes << 40.0, -25.0, 12.0;
  const Matrix s = planted_symmetric(300, spikes, rng, 0.05);
  const auto pairs = leading_eigenpairs(s, 3, 17);
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  const Vector ev = es.eigenvalues();
  std::vector<Eigen::Index> order(300);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return std::abs(ev(x)) > std::abs(ev(y)); });
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(pairs.values(i), ev(order[static_cast<std::size_t>(i)]), 1e-8 * 40);
    const double align = std::abs(pairs.vectors.col(i).dot(es.eigenvectors().col(order[static_cast<std::size_t>(i)])));
    EXPECT_NEAR(align, 1.0, 1e-8);
  }
}

TEST(LeadingEigenpairs, SignConventionLargestEntryPositive) {
  Philox4x32 rng(3);
  Vector spikes(2);
  spikes << 10.0, 5.0;
  const auto pairs = leading_eigenpairs(planted_symmetric(150, spikes, rng, 0.01), 2, 4);
  for (int i = 0; i < 2; ++i) {
    Eigen::Index idx = 0;
    pairs.vectors.col(i).cwiseAbs().maxCoeff(&idx);
    EXPECT_GT(pairs.vectors(idx, i), 0.0);
  }
}

TEST(LeadingEigenpairs, DeterministicPerSeed) {
  Philox4x32 rng(4);
  Vector spikes(2);
  spikes << 10.0, 5.0;
  const Matrix s = planted_symmetric(200, spikes, rng, 0.05);
  const auto a = leading_eigenpairs(s, 2, 9);
  const auto b = leading_eigenpairs(s, 2, 9);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.vectors, b.vectors);
}

TEST(LeadingSingularTriplets, MatchesJacobiSvd) {
  Philox4x32 rng(5);
  for (const Eigen::Index rows : {30, 250}) {
    const Matrix u = random_frame(rows, 2, rng);
    const Matrix v = random_frame(rows + 40, 2, rng);
    const Matrix y = 30.0 * u.col(0) * v.col(0).transpose() + 15.0 * u.col(1) * v.col(1).transpose() +
                     0.05 * random_matrix(rows, rows + 40, rng);
    const auto t = leading_singular_triplets(y, 2, 6);
    Eigen::JacobiSVD<Matrix> svd(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
    for (int i = 0; i < 2; ++i) {
      EXPECT_NEAR(t.values(i), svd.singularValues()(i), 1e-8 * 30);
      EXPECT_NEAR(std::abs(t.left.col(i).dot(svd.matrixU().col(i))), 1.0, 1e-8);
      EXPECT_NEAR(std::abs(t.right.col(i).dot(svd.matrixV().col(i))), 1.0, 1e-8);
      EXPECT_LE((y * t.right.col(i) - t.values(i) * t.left.col(i)).norm(), 1e-8 * 30);
    }
  }
}
