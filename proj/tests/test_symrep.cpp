#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lowrank/battery.hpp"
#include "lowrank/errors.hpp"
#include "lowrank/symrep.hpp"
#include "test_support.hpp"

using namespace lowrank;
using lowrank::testing::central_difference;
using lowrank::testing::relative_error;

namespace {

ThetaSym hand_theta() { return ThetaSym(Phi(2, 1, (Vector(1) << 0.5).finished()), (Vector(1) << 2.0).finished()); }

Matrix hand_sigma() { return (Matrix(2, 2) << 0.72, 0.96, 0.96, 1.28).finished(); }

}  // namespace

TEST(SigmaOfTheta, HandExample) {
  EXPECT_LE((sigma_of_theta(hand_theta()) - hand_sigma()).norm(), 1e-15);
}

TEST(SigmaOfTheta, ZeroMuGivesZero) {
  Philox4x32 rng(1);
  const ThetaSym t(random_phi(5, 2, rng), Vector::Zero(3));
  EXPECT_EQ(sigma_of_theta(t), Matrix::Zero(5, 5));
}

TEST(SigmaOfTheta, SpectrumMatchesM) {
  Philox4x32 rng(2);
  const ThetaSym t = random_theta_sym(6, 2, rng, false);
  const Vector ev = eigenvalues_by_magnitude(sigma_of_theta(t));
  const Vector em = eigenvalues_by_magnitude(t.m());
  EXPECT_NEAR(ev(0), em(0), 1e-12);
  EXPECT_NEAR(ev(1), em(1), 1e-12);
  EXPECT_LE(std::abs(ev(2)), 1e-12);
}

TEST(ThetaOfSigma, HandExample) {
  const ThetaSym t = theta_of_sigma(hand_sigma(), 1);
  EXPECT_NEAR(t.phi().values()(0), 0.5, 1e-12);
  EXPECT_NEAR(t.mu()(0), 2.0, 1e-12);
}

TEST(ThetaOfSigma, RoundTripRandom) {
  Philox4x32 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const ThetaSym t = random_theta_sym(8, 3, rng, trial % 2 == 0);
    const ThetaSym back = theta_of_sigma(sigma_of_theta(t), 3);
    EXPECT_LE((back.vector() - t.vector()).norm(), 1e-8 * t.vector().norm());
  }
}

TEST(ThetaOfSigma, RankMismatch) {
  Philox4x32 rng(4);
  const ThetaSym t = random_theta_sym(6, 2, rng);
  try {
    theta_of_sigma(sigma_of_theta(t), 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RankMismatch);
  }
}

TEST(ThetaOfSigma, DegenerateTopBlock) {
  Matrix s = Matrix::Zero(2, 2);
  s(1, 1) = 1.0;
  try {
    theta_of_sigma(s, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateTopBlock);
  }
}

TEST(ThetaOfSigma, RejectsAsymmetric) {
  Matrix s = hand_sigma();
  s(0, 1) += 0.1;
  EXPECT_THROW(theta_of_sigma(s, 1), Error);
}

TEST(Dsigma, MatchesCentralDifferences) {
  Philox4x32 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const ThetaSym t = random_theta_sym(6, 2, rng, trial % 2 == 0);
    const Matrix fd = central_difference(
        [](const Vector& v) { return vec(sigma_of_theta(ThetaSym::from_vector(6, 2, v))); }, t.vector());
    EXPECT_LE(relative_error(fd, dsigma(t)), 1e-6);
  }
}

TEST(Dsigma, MuBlockIdentity) {
  Philox4x32 rng(6);
  const ThetaSym t = random_theta_sym(5, 3, rng);
  const Matrix jac = dsigma(t);
  const Matrix u = cayley_map(t.phi()).matrix();
  const Eigen::Index q = t.phi().size();
  for (Eigen::Index k = 0; k < t.mu().size(); ++k) {
    Vector e = Vector::Zero(t.mu().size());
    e(k) = 1.0;
    const Matrix basis = unvech(e, 3);
    EXPECT_LE((jac.col(q + k) - vec(u * basis * u.transpose())).norm(), 1e-13);
  }
}

TEST(Dsigma, FullRankSquareCaseIsDuplication) {
  Philox4x32 rng(7);
  const ThetaSym t(Phi::zero(3, 3), vech(random_symmetric(3, rng, true)));
  EXPECT_LE((dsigma(t) - duplication_matrix(3)).norm(), 1e-15);
}

TEST(Dsigma, FullColumnRank) {
  Philox4x32 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const ThetaSym t = random_theta_sym(7, 2, rng, false);
    Eigen::JacobiSVD<Matrix> svd(dsigma(t));
    EXPECT_GT(svd.singularValues().minCoeff(), 1e-8);
  }
}

TEST(TaylorCertificateSym, EqualAndRandom) {
  Philox4x32 rng(9);
  const ThetaSym t0 = random_theta_sym(8, 3, rng);
  const Certificate same = taylor_certificate_sym(t0, t0);
  EXPECT_EQ(same.observed, 0.0);
  EXPECT_TRUE(same.pass);
  for (int trial = 0; trial < 200; ++trial) {
    const ThetaSym a = random_theta_sym(8, 3, rng, false);
    const ThetaSym b = random_theta_sym(8, 3, rng, false);
    const Certificate c = taylor_certificate_sym(a, b);
    EXPECT_TRUE(c.pass) << c.observed << " vs " << c.bound;
  }
}

TEST(InversePerturbation, EqualNearAndFar) {
  Philox4x32 rng(10);
  const ThetaSym t0 = random_theta_sym(6, 2, rng, true);
  const auto same = inverse_perturbation_certificate(t0, t0);
  ASSERT_TRUE(same.has_value());
  EXPECT_TRUE(same->pass);
  for (int trial = 0; trial < 50; ++trial) {
    const ThetaSym base = random_theta_sym(6, 2, rng, true);
    const ThetaSym near = ThetaSym::from_vector(6, 2, perturb(base.vector(), 1e-4, rng));
    const auto c = inverse_perturbation_certificate(near, base);
    ASSERT_TRUE(c.has_value());
    EXPECT_TRUE(c->pass) << c->observed << " vs " << c->bound;
  }
  Vector mu_far = t0.mu() * 50.0;
  const ThetaSym far(t0.phi(), mu_far);
  EXPECT_FALSE(inverse_perturbation_certificate(far, t0).has_value());
}

TEST(SubspaceCertificates, EqualCloseAndDistant) {
  Philox4x32 rng(11);
  const Phi phi0 = random_phi(7, 2, rng);
  const auto same = subspace_equivalence_certificates(phi0, phi0);
  EXPECT_TRUE(same.c1.pass && same.c2.pass);
  ASSERT_TRUE(same.c3.has_value());
  EXPECT_TRUE(same.c3->pass);
  for (int trial = 0; trial < 200; ++trial) {
    const Phi base = random_phi(7, 2, rng);
    const Phi close(7, 2, perturb(base.values(), 1e-4, rng));
    const auto c = subspace_equivalence_certificates(close, base);
    EXPECT_TRUE(c.c1.pass);
    EXPECT_TRUE(c.c2.pass);
    ASSERT_TRUE(c.c3.has_value());
    EXPECT_TRUE(c.c3->pass);
    ASSERT_TRUE(c.frame.has_value());
    EXPECT_TRUE(c.frame->pass);
  }
  Matrix a0 = Matrix::Zero(5, 2);
  Matrix a1 = Matrix::Zero(5, 2);
  a0(0, 0) = 0.9;
  a1(0, 0) = -0.9;
  const auto distant = subspace_equivalence_certificates(Phi::from_matrix(7, a1), Phi::from_matrix(7, a0));
  EXPECT_TRUE(distant.c1.pass && distant.c2.pass);
  EXPECT_FALSE(distant.c3.has_value());
}

TEST(Regularity, RankOneAtOrigin) {
  const ThetaSym t(Phi::zero(2, 1), (Vector(1) << 1.0).finished());
  const RegularityRecord rec = regularity_bounds(t);
  EXPECT_NEAR(rec.sigma_min_bound, 2.0 * std::numbers::sqrt2, 1e-15);
  EXPECT_GE(rec.sigma_min_observed, 2.0 * std::numbers::sqrt2 * (1 - 1e-12));
  EXPECT_NEAR(rec.inv_gram_norm_bound, 1.0 + 65.0 / 8.0, 1e-14);
  ASSERT_TRUE(rec.sigma_min.has_value());
  EXPECT_TRUE(rec.sigma_min->pass);
  EXPECT_TRUE(rec.inv_gram.pass);
}

TEST(Regularity, RandomInstancesPass) {
  Philox4x32 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index r = 1 + static_cast<Eigen::Index>(trial % 3);
    const Eigen::Index p = r + 1 + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(8 - r)));
    const RegularityRecord rec = regularity_bounds(random_theta_sym(p, r, rng, false));
    ASSERT_TRUE(rec.sigma_min.has_value());
    EXPECT_TRUE(rec.sigma_min->pass) << rec.sigma_min_observed << " vs " << rec.sigma_min_bound;
    EXPECT_TRUE(rec.inv_gram.pass) << rec.inv_gram_norm_observed << " vs " << rec.inv_gram_norm_bound;
  }
}

TEST(Regularity, SquareCaseSkipsSigmaMin) {
  Philox4x32 rng(13);
  const ThetaSym t(Phi::zero(3, 3), vech(random_symmetric(3, rng, true)));
  const RegularityRecord rec = regularity_bounds(t);
  EXPECT_FALSE(rec.sigma_min.has_value());
  EXPECT_TRUE(rec.inv_gram.pass);
}
