#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lowrank/battery.hpp"
#include "lowrank/cayley.hpp"
#include "lowrank/errors.hpp"
#include "test_support.hpp"

using namespace lowrank;
using lowrank::testing::central_difference;
using lowrank::testing::random_matrix;
using lowrank::testing::relative_error;

namespace {

Phi half_phi() { return Phi(2, 1, (Vector(1) << 0.5).finished()); }

}  // namespace

TEST(Phi, RejectsOutsideUnitBall) {
  Matrix a(2, 1);
  a << 0.8, 0.6;
  try {
    Phi::from_matrix(3, a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DomainViolation);
  }
}

TEST(SkewEmbed, ZeroAndHandExample) {
  EXPECT_EQ(skew_embed(Phi::zero(4, 2)), Matrix::Zero(4, 4));
  Matrix expected(2, 2);
  expected << 0, -0.5, 0.5, 0;
  EXPECT_EQ(skew_embed(half_phi()), expected);
}

TEST(CayleyMap, ZeroGivesIdentityFrame) {
  EXPECT_LE((cayley_map(Phi::zero(5, 2)).matrix() - identity_frame(5, 2)).norm(), 1e-15);
}

TEST(CayleyMap, HandExample) {
  const Matrix u = cayley_map(half_phi()).matrix();
  EXPECT_NEAR(u(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(u(1, 0), 0.8, 1e-15);
}

TEST(CayleyInverse, HandExample) {
  Matrix u(2, 1);
  u << 0.6, 0.8;
  EXPECT_NEAR(cayley_inverse(StiefelPlus(u)).values()(0), 0.5, 1e-15);
  EXPECT_EQ(cayley_inverse(StiefelPlus(identity_frame(4, 2))).values(), Vector::Zero(4));
}

TEST(CayleyMap, LandsInStiefelPlusAndRoundTrips) {
  Philox4x32 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index p = 2 + static_cast<Eigen::Index>(rng.below(8));
    const Eigen::Index r = 1 + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(std::min<Eigen::Index>(3, p - 1))));
    const Phi phi = random_phi(p, r, rng);
    const Matrix u = cayley_map(phi).matrix();
    EXPECT_TRUE(is_orthonormal(u));
    const Matrix top = u.topRows(r);
    EXPECT_LE((top - top.transpose()).norm(), 1e-12);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(top).eigenvalues().minCoeff(), 0.0);
    EXPECT_LE((cayley_inverse(cayley_map(phi)).values() - phi.values()).norm(), 1e-10 * (1 + phi.values().norm()));
  }
}

TEST(StiefelPlus, RejectsNonPositiveTopBlock) {
  Matrix u(2, 1);
  u << -0.6, 0.8;
  try {
    StiefelPlus s(u);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TopBlockNotPD);
  }
}

TEST(GammaMatrix, HandExampleTwoByOne) {
  EXPECT_EQ(gamma_matrix(2, 1), (Matrix(4, 1) << 0, 1, -1, 0).finished());
}

TEST(GammaMatrix, DefiningIdentityAndNorm) {
  Philox4x32 rng(2);
  const Matrix gamma = gamma_matrix(5, 2);
  for (int trial = 0; trial < 10; ++trial) {
    const Phi phi = random_phi(5, 2, rng);
    EXPECT_LE((gamma * phi.values() - vec(skew_embed(phi))).norm(), 1e-15);
  }
  EXPECT_NEAR(spectral_norm(gamma), std::numbers::sqrt2, 1e-12);
}

TEST(CayleyJacobian, MatchesCentralDifferences) {
  Philox4x32 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Phi phi = random_phi(6, 2, rng, 0.9);
    const Matrix fd = central_difference(
        [](const Vector& v) { return vec(cayley_map(Phi(6, 2, v)).matrix()); }, phi.values());
    EXPECT_LE(relative_error(fd, cayley_jacobian(phi)), 1e-6);
  }
}

TEST(CayleyJacobian, ColumnwiseDifferentialOracle) {
  // dU = 2 B Xdot B I_{p x r} with B = (I - X)^{-1}, one basis direction at a time.
  Philox4x32 rng(4);
  const Eigen::Index p = 5;
  const Eigen::Index r = 2;
  const Phi phi = random_phi(p, r, rng);
  const Matrix b = (Matrix::Identity(p, p) - skew_embed(phi)).inverse();
  const Matrix jac = cayley_jacobian(phi);
  for (Eigen::Index k = 0; k < phi.size(); ++k) {
    Vector e = Vector::Zero(phi.size());
    e(k) = 1.0;
    const Matrix xdot = unvec(gamma_matrix(p, r) * e, p, p);
    const Matrix du = 2.0 * b * xdot * b * identity_frame(p, r);
    EXPECT_LE((jac.col(k) - vec(du)).norm(), 1e-13);
  }
}

TEST(CayleyJacobian, AtZeroIsTwiceEmbeddedBasis) {
  const Eigen::Index p = 4;
  const Eigen::Index r = 2;
  const Matrix jac = cayley_jacobian(Phi::zero(p, r));
  for (Eigen::Index k = 0; k < (p - r) * r; ++k) {
    Vector e = Vector::Zero((p - r) * r);
    e(k) = 1.0;
    EXPECT_LE((jac.col(k) - 2.0 * vec(unvec(gamma_matrix(p, r) * e, p, p) * identity_frame(p, r))).norm(), 1e-15);
  }
}

TEST(CayleyJacobian, NormAtMostTwoSqrtTwo) {
  Philox4x32 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Phi phi = random_phi(6, 3, rng);
    EXPECT_LE(spectral_norm(cayley_jacobian(phi)), 2.0 * std::numbers::sqrt2 * (1 + 1e-12));
  }
}

TEST(TaylorCertificateU, EqualPointsGiveZero) {
  Philox4x32 rng(6);
  const Phi phi = random_phi(5, 2, rng);
  const auto certs = taylor_certificate_U(phi, phi);
  EXPECT_EQ(certs.lipschitz.observed, 0.0);
  EXPECT_EQ(certs.remainder.observed, 0.0);
  EXPECT_TRUE(certs.lipschitz.pass);
  EXPECT_TRUE(certs.remainder.pass);
}

TEST(TaylorCertificateU, RandomPairsPass) {
  Philox4x32 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Phi phi0 = random_phi(8, 3, rng);
    const Phi phi = random_phi(8, 3, rng);
    const auto certs = taylor_certificate_U(phi, phi0);
    EXPECT_TRUE(certs.lipschitz.pass) << certs.lipschitz.observed << " vs " << certs.lipschitz.bound;
    EXPECT_TRUE(certs.remainder.pass) << certs.remainder.observed << " vs " << certs.remainder.bound;
    EXPECT_EQ(certs.lipschitz.label, "cayley.lipschitz");
  }
}

TEST(TaylorCertificateU, RemainderIsQuadratic) {
  Philox4x32 rng(8);
  const Phi phi0 = random_phi(6, 2, rng, 0.5);
  const Vector dir = lowrank::testing::random_vector(phi0.size(), rng).normalized();
  const double r1 = taylor_certificate_U(Phi(6, 2, phi0.values() + 1e-2 * dir), phi0).remainder.observed;
  const double r2 = taylor_certificate_U(Phi(6, 2, phi0.values() + 5e-3 * dir), phi0).remainder.observed;
  EXPECT_NEAR(r1 / r2, 4.0, 0.1);
}

TEST(LipschitzCertificateA, RandomPairsPass) {
  Philox4x32 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const auto u0 = cayley_map(random_phi(7, 2, rng));
    const auto u = cayley_map(random_phi(7, 2, rng));
    const Certificate c = lipschitz_certificate_A(u, u0);
    EXPECT_TRUE(c.pass) << c.observed << " vs " << c.bound;
  }
  const auto u0 = cayley_map(random_phi(4, 1, rng));
  const Certificate same = lipschitz_certificate_A(u0, u0);
  EXPECT_EQ(same.observed, 0.0);
  EXPECT_TRUE(same.pass);
}

TEST(Certificate, ToleranceAndTightness) {
  EXPECT_TRUE(Certificate::at_most("x", 1.0 + 5e-10, 1.0).pass);
  EXPECT_FALSE(Certificate::at_most("x", 1.0 + 2e-9, 1.0).pass);
  EXPECT_TRUE(Certificate::at_least("x", 1.0 - 5e-10, 1.0).pass);
  EXPECT_FALSE(Certificate::at_least("x", std::nan(""), 1.0).pass);
  EXPECT_NEAR(Certificate::at_most("x", 1.0, 4.0).tightness(), 0.25, 1e-15);
  EXPECT_NEAR(Certificate::at_least("x", 4.0, 1.0).tightness(), 0.25, 1e-15);
}
