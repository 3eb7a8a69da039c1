#include "lowrank/bicluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "lowrank/eigs.hpp"
#include "lowrank/errors.hpp"
#include "lowrank/gauss_newton.hpp"
#include "lowrank/rng.hpp"

namespace lowrank {

namespace {

std::vector<int> inverse_permutation(const std::vector<int>& perm) {
  std::vector<int> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = static_cast<int>(i);
  return inv;
}

Matrix permute_columns(const Matrix& s, const std::vector<int>& perm) {
  Matrix out(s.rows(), s.cols());
  for (Eigen::Index j = 0; j < s.cols(); ++j) out.col(j) = s.col(perm[j]);
  return out;
}

double min_row_distance(const Matrix& x) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < x.rows(); ++a)
    for (Eigen::Index b = a + 1; b < x.rows(); ++b) best = std::min(best, (x.row(a) - x.row(b)).norm());
  return best;
}

bool is_probability_vector(const Vector& v, Eigen::Index len) {
  return v.size() == len && (v.array() > 0.0).all() && std::abs(v.sum() - 1.0) <= 1e-9;
}

double noise_draw(NoiseFamily family, double sd, Philox4x32& rng) {
  switch (family) {
    case NoiseFamily::Gaussian: return sd * rng.normal();
    case NoiseFamily::Uniform: return sd * std::numbers::sqrt3 * (2.0 * rng.uniform() - 1.0);
    case NoiseFamily::Rademacher: return (rng() & 1u) != 0u ? sd : -sd;
  }
  return 0.0;
}

}  // namespace

Separation separation(const Matrix& sigma0, int r) {
  const Eigen::JacobiSVD<Matrix> svd(sigma0, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector root = svd.singularValues().head(r).cwiseSqrt();
  const Matrix left = svd.matrixU().leftCols(r) * root.asDiagonal();
  const Matrix right = svd.matrixV().leftCols(r) * root.asDiagonal();
  return {min_row_distance(left), min_row_distance(right)};
}

BiclusterModel::BiclusterModel(Matrix s, ClusterAssignment t, ClusterAssignment g, double var, Vector ww, Vector pp,
                               int rank, NoiseFamily family, double separation_threshold)
    : sigma0(std::move(s)), tau0(std::move(t)), gamma0(std::move(g)), sigma2(var), w(std::move(ww)),
      pi(std::move(pp)), r(rank), noise(family) {
  require(tau0.k == p1() && gamma0.k == p2(), ErrorCode::DimensionMismatch,
          "BiclusterModel: label counts must match Sigma0 dimensions");
  require(sigma2 >= 0.0, ErrorCode::DomainViolation, "BiclusterModel: noise variance must be nonnegative");
  require(is_probability_vector(w, p1()) && is_probability_vector(pi, p2()), ErrorCode::DimensionMismatch,
          "BiclusterModel: w and pi must be positive probability vectors");
  require(r >= 1 && r <= std::min(p1(), p2()), ErrorCode::DimensionMismatch, "BiclusterModel: invalid r");
  const Vector sv = Eigen::JacobiSVD<Matrix>(sigma0).singularValues();
  Eigen::Index rank0 = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) rank0 += sv(k) > 1e-9 * sv(0);
  require(sv(0) > 0.0 && rank0 == r, ErrorCode::RankMismatch, "BiclusterModel: rank of Sigma0 differs from r");
  const Separation sep = separation(sigma0, r);
  if (p1() > 1 && sep.rows < separation_threshold)
    warnings.push_back("row classes of Sigma0 are separated by only " + std::to_string(sep.rows));
  if (p2() > 1 && sep.cols < separation_threshold)
    warnings.push_back("column classes of Sigma0 are separated by only " + std::to_string(sep.cols));
}

Matrix sample_data(const BiclusterModel& model, std::uint64_t seed, std::uint64_t stream) {
  const Eigen::Index m = static_cast<Eigen::Index>(model.tau0.size());
  const Eigen::Index n = static_cast<Eigen::Index>(model.gamma0.size());
  const double sd = std::sqrt(model.sigma2);
  Philox4x32 rng(seed, stream);
  Matrix y(m, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i)
      y(i, j) = model.sigma0(model.tau0.labels[i], model.gamma0.labels[j]) + (sd > 0.0 ? noise_draw(model.noise, sd, rng) : 0.0);
  return y;
}

std::pair<ClusterAssignment, ClusterAssignment> spectral_cocluster(const Matrix& y, int r, int p1, int p2,
                                                                   std::uint64_t seed,
                                                                   const KmeansOptions& options) {
  require(r >= 1 && r <= std::min(p1, p2), ErrorCode::DimensionMismatch, "spectral_cocluster: need r <= min(p1, p2)");
  const SingularTriplets svd = leading_singular_triplets(y, r, seed);
  ClusterAssignment rows = kmeans(svd.left, p1, seed, options).assignment;
  ClusterAssignment cols = kmeans(svd.right, p2, seed + 1, options).assignment;
  return {std::move(rows), std::move(cols)};
}

Matrix block_means(const Matrix& y, const ClusterAssignment& tau, const ClusterAssignment& gamma) {
  require(static_cast<std::size_t>(y.rows()) == tau.size() && static_cast<std::size_t>(y.cols()) == gamma.size(),
          ErrorCode::DimensionMismatch, "block_means: labels do not match data shape");
  Matrix sums = Matrix::Zero(tau.k, gamma.k);
  Matrix counts = Matrix::Zero(tau.k, gamma.k);
  for (Eigen::Index j = 0; j < y.cols(); ++j)
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      sums(tau.labels[i], gamma.labels[j]) += y(i, j);
      counts(tau.labels[i], gamma.labels[j]) += 1.0;
    }
  require((counts.array() > 0.0).all(), ErrorCode::EmptyBlock, "block_means: a block has no entries");
  return sums.cwiseQuotient(counts);
}

RectFit lse_theta(const Matrix& sigma_hat, int r) {
  const Eigen::Index p1 = sigma_hat.rows();
  const Eigen::Index p2 = sigma_hat.cols();
  require(r >= 1 && r <= std::min(p1, p2), ErrorCode::DimensionMismatch, "lse_theta: need r <= min(p1, p2)");
  const Eigen::JacobiSVD<Matrix> svd(sigma_hat, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Matrix truncated = svd.matrixU().leftCols(r) * svd.singularValues().head(r).asDiagonal() *
                           svd.matrixV().leftCols(r).transpose();
  std::vector<int> perm(p2);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    try {
      const ThetaRect start = theta_of_sigma_rect(permute_columns(truncated, perm), r);
      const Matrix target = permute_columns(sigma_hat, perm);
      const ResidualFunction f = [&](const Vector& x, Vector& residual, Matrix* jac) {
        try {
          const ThetaRect th = ThetaRect::from_vector(p1, p2, r, x);
          residual = vec(target - sigma_of_theta_rect(th));
          if (jac != nullptr) *jac = dsigma_rect(th);
          return true;
        } catch (const Error& e) {
          if (e.code() == ErrorCode::DomainViolation) return false;
          throw;
        }
      };
      const double initial = 0.5 * (target - sigma_of_theta_rect(start)).squaredNorm();
      const GaussNewtonResult gn = gauss_newton(start.vector(), f);
      return RectFit{ThetaRect::from_vector(p1, p2, r, gn.x), perm, gn.iterations, gn.gradient_norm, gn.objective,
                     initial};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateTopBlock && e.code() != ErrorCode::TopBlockNotPD &&
          e.code() != ErrorCode::DomainViolation)
        throw;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  fail(ErrorCode::ProjectionFailed, "lse_theta: no column permutation admits a representer");
}

Matrix asymptotic_cov_G(const ThetaRect& theta, const Vector& w, const Vector& pi, double sigma2,
                        const std::vector<int>& row_permutation, const std::vector<int>& col_permutation,
                        BlockWeighting weighting) {
  const Eigen::Index p1 = theta.p1();
  const Eigen::Index p2 = theta.p2();
  require(w.size() == p1 && pi.size() == p2 && static_cast<Eigen::Index>(row_permutation.size()) == p1 &&
              static_cast<Eigen::Index>(col_permutation.size()) == p2,
          ErrorCode::DimensionMismatch, "asymptotic_cov_G: weight or permutation length mismatch");
  Vector wp(p1), pp(p2);
  for (Eigen::Index s = 0; s < p1; ++s) wp(row_permutation[s]) = w(s);
  for (Eigen::Index t = 0; t < p2; ++t) pp(col_permutation[t]) = pi(t);
  Vector middle(p1 * p2);
  for (Eigen::Index t = 0; t < p2; ++t)
    for (Eigen::Index s = 0; s < p1; ++s) {
      const double share = wp(s) * pp(t);
      middle(s + t * p1) = weighting == BlockWeighting::Reciprocal ? sigma2 / share : sigma2 * share;
    }
  const Matrix jac = dsigma_rect(theta);
  const Matrix gram = jac.transpose() * jac;
  const Vector sv = Eigen::JacobiSVD<Matrix>(jac).singularValues();
  require(sv(sv.size() - 1) > 1e-12 * std::max(1.0, sv(0)), ErrorCode::SingularGram,
          "asymptotic_cov_G: D Sigma is rank deficient");
  const Matrix bread = gram.ldlt().solve(Matrix::Identity(gram.rows(), gram.cols()));
  return symmetrize(bread * jac.transpose() * middle.asDiagonal() * jac * bread);
}

ExperimentResult bicluster_experiment(const BiclusterExperimentConfig& config) {
  const int p1 = static_cast<int>(config.sigma0.rows());
  const int p2 = static_cast<int>(config.sigma0.cols());
  const int r = config.r;
  ExperimentResult result;
  result.d = rect_dim(p1, p2, r);
  const Eigen::Index d = result.d;
  const int reps = config.replicates;
  const int cells = static_cast<int>(config.sizes.size());
  std::vector<BiclusterModel> models;
  for (const auto& [m, n] : config.sizes)
    models.emplace_back(config.sigma0, balanced_assignment(m, config.w), balanced_assignment(n, config.pi),
                        config.sigma2, config.w, config.pi, r, config.noise);

  result.rows.resize(static_cast<std::size_t>(reps) * cells);
  for (int ci = 0; ci < cells; ++ci) {
    const auto [m, n] = config.sizes[ci];
    const BiclusterModel& model = models[ci];
    parallel_for(reps, [&](int rep) {
      ReplicateRecord rec;
      rec.replicate = rep;
      rec.m = m;
      rec.n = n;
      const std::uint64_t rep_seed = config.seed + static_cast<std::uint64_t>(rep);
      try {
        const Matrix y = sample_data(model, rep_seed, 2 * static_cast<std::uint64_t>(ci));
        const auto [tau_hat, gamma_hat] = spectral_cocluster(
            y, r, p1, p2, rep_seed ^ (0xB1C1ULL << 32 | static_cast<std::uint64_t>(ci)), config.kmeans);
        const Alignment rows = align_labels(tau_hat, model.tau0);
        const Alignment cols = align_labels(gamma_hat, model.gamma0);
        rec.aligned_hamming = rows.hamming;
        rec.aligned_hamming_cols = cols.hamming;
        rec.excluded = rows.hamming != 0 || cols.hamming != 0;

        const Matrix sigma_hat = block_means(y, tau_hat, gamma_hat);
        const RectFit fit = lse_theta(sigma_hat, r);
        const std::vector<int> inv = inverse_permutation(fit.column_permutation);
        std::vector<int> col_omega(p2);
        for (int t = 0; t < p2; ++t) col_omega[t] = inv[cols.permutation[t]];
        // Truth in working coordinates: entry (rows.permutation[a], col_omega[b]) = sigma0(a, b).
        Matrix sigma0_pi(p1, p2);
        for (int b = 0; b < p2; ++b)
          for (int a = 0; a < p1; ++a) sigma0_pi(rows.permutation[a], col_omega[b]) = config.sigma0(a, b);
        const ThetaRect theta0_pi = theta_of_sigma_rect(sigma0_pi, r);
        const Matrix g = asymptotic_cov_G(theta0_pi, config.w, config.pi, config.sigma2, rows.permutation, col_omega,
                                          config.weighting);
        const double scale = std::sqrt(static_cast<double>(m) * static_cast<double>(n));
        rec.z = scale * sym_inv_sqrt(g) * (fit.theta.vector() - theta0_pi.vector());
        rec.mse_estimator = scale * scale * (sigma_of_theta_rect(fit.theta) - sigma0_pi).squaredNorm();
        rec.mse_naive = scale * scale * (permute_columns(sigma_hat, fit.column_permutation) - sigma0_pi).squaredNorm();
      } catch (const Error&) {
        rec.failed = true;
        rec.excluded = true;
        rec.z = Vector::Constant(d, std::numeric_limits<double>::quiet_NaN());
        rec.mse_estimator = std::numeric_limits<double>::quiet_NaN();
        rec.mse_naive = std::numeric_limits<double>::quiet_NaN();
      }
      result.rows[static_cast<std::size_t>(ci) * reps + rep] = std::move(rec);
    });
    const auto first = result.rows.begin() + static_cast<std::ptrdiff_t>(ci) * reps;
    MonteCarloSummary summary = summarize(std::vector<ReplicateRecord>(first, first + reps), d);
    summary.m = m;
    summary.n = n;
    result.summaries.push_back(std::move(summary));
  }
  return result;
}

}  // namespace lowrank
