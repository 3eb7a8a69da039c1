#include "lowrank/sbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lowrank/eigs.hpp"
#include "lowrank/errors.hpp"
#include "lowrank/gauss_newton.hpp"
#include "lowrank/rng.hpp"

namespace lowrank {

namespace {

constexpr double kProbabilityFloor = 1e-6;
constexpr double kMaxFisherCondition = 1e12;

std::vector<int> inverse_permutation(const std::vector<int>& perm) {
  std::vector<int> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = static_cast<int>(i);
  return inv;
}

Matrix checked_probabilities(const ThetaSym& theta) {
  const Matrix sigma = sigma_of_theta(theta);
  const bool inside = (sigma.array() > kProbabilityFloor).all() && (sigma.array() < 1.0 - kProbabilityFloor).all();
  require(inside, ErrorCode::ProbabilityOutOfRange, "Sigma(theta) has entries outside (1e-6, 1 - 1e-6)");
  return sigma;
}

void require_counts_shape(const ThetaSym& theta, const BlockCounts& counts) {
  require(counts.edges.rows() == theta.p() && counts.edges.cols() == theta.p() &&
              counts.pairs.rows() == theta.p() && counts.pairs.cols() == theta.p(),
          ErrorCode::DimensionMismatch, "block counts do not match K");
}

// Unnormalized per-block weight times the row of D Sigma for entry (s, t).
template <typename Weight>
Matrix weighted_gram(const ThetaSym& theta, const Matrix& sigma, Weight weight) {
  const Eigen::Index k = theta.p();
  const Matrix jac = dsigma(theta);
  Matrix out = Matrix::Zero(theta.dim(), theta.dim());
  for (Eigen::Index t = 0; t < k; ++t)
    for (Eigen::Index s = 0; s < k; ++s) {
      const double w = weight(s, t);
      if (w == 0.0) continue;
      const auto row = jac.row(s + t * k);
      out.noalias() += (w / (sigma(s, t) * (1.0 - sigma(s, t)))) * row.transpose() * row;
    }
  return symmetrize(out);
}

Matrix pair_counts(const ClusterAssignment& tau) {
  const int k = tau.k;
  Matrix pairs = Matrix::Zero(k, k);
  std::vector<double> seen(k, 0.0);
  for (int t : tau.labels) {
    for (int s = 0; s < k; ++s) pairs(s, t) += seen[s];
    seen[t] += 1.0;
  }
  return pairs;
}

}  // namespace

SbmModel::SbmModel(Matrix s, ClusterAssignment t, int rank, Vector p)
    : sigma0(std::move(s)), tau0(std::move(t)), r(rank), pi(std::move(p)) {
  require(sigma0.rows() == sigma0.cols() && sigma0.rows() >= 1, ErrorCode::DimensionMismatch,
          "SbmModel: Sigma0 must be square");
  require(is_symmetric(sigma0), ErrorCode::AsymmetricInput, "SbmModel: Sigma0 must be symmetric");
  require((sigma0.array() > 0.0).all() && (sigma0.array() < 1.0).all(), ErrorCode::DomainViolation,
          "SbmModel: entries of Sigma0 must lie in (0, 1)");
  require(tau0.k == K(), ErrorCode::DimensionMismatch, "SbmModel: tau0 must use K labels");
  require(pi.size() == K() && (pi.array() > 0.0).all() && std::abs(pi.sum() - 1.0) <= 1e-9,
          ErrorCode::DimensionMismatch, "SbmModel: pi must be a positive probability vector of length K");
  const Vector ev = eigenvalues_by_magnitude(sigma0);
  Eigen::Index rank0 = 0;
  for (Eigen::Index k = 0; k < ev.size(); ++k) rank0 += std::abs(ev(k)) > 1e-9 * std::abs(ev(0));
  require(r >= 1 && rank0 == r, ErrorCode::RankMismatch, "SbmModel: rank of Sigma0 differs from r");
}

Adjacency sample_adjacency(const SbmModel& model, std::uint64_t seed, std::uint64_t stream) {
  const int n = model.n();
  Philox4x32 rng(seed, stream);
  Adjacency a = Adjacency::Zero(n, n);
  const auto& lab = model.tau0.labels;
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i)
      if (rng.uniform() < model.sigma0(lab[i], lab[j])) {
        a(i, j) = 1.0;
        a(j, i) = 1.0;
      }
  return a;
}

ClusterAssignment spectral_cluster_sbm(const Adjacency& a, int r, int K, std::uint64_t seed,
                                       const KmeansOptions& options) {
  require(r >= 1 && r <= K && K <= a.rows(), ErrorCode::DimensionMismatch, "spectral_cluster_sbm: need r <= K <= n");
  const EigenPairs eig = leading_eigenpairs(a, r, seed);
  return kmeans(eig.vectors, K, seed, options).assignment;
}

BlockCounts block_counts(const Adjacency& a, const ClusterAssignment& tau) {
  require(a.rows() == a.cols() && static_cast<std::size_t>(a.rows()) == tau.size(), ErrorCode::DimensionMismatch,
          "block_counts: adjacency and labels differ in size");
  const int k = tau.k;
  BlockCounts c{Matrix::Zero(k, k), pair_counts(tau)};
  const auto& lab = tau.labels;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < j; ++i)
      if (a(i, j) != 0.0) c.edges(lab[i], lab[j]) += 1.0;
  return c;
}

Matrix block_mean_estimator(const Adjacency& a, const ClusterAssignment& tau) {
  const BlockCounts c = block_counts(a, tau);
  const int k = tau.k;
  Matrix out(k, k);
  for (int t = 0; t < k; ++t)
    for (int s = 0; s < k; ++s) {
      const double pairs = s == t ? c.pairs(s, s) : c.pairs(s, t) + c.pairs(t, s);
      const double edges = s == t ? c.edges(s, s) : c.edges(s, t) + c.edges(t, s);
      require(pairs > 0.0, ErrorCode::EmptyBlock, "block_mean_estimator: no node pairs for a class pair");
      out(s, t) = edges / pairs;
    }
  return out;
}

Matrix clip_probabilities(const Matrix& sigma, double eps) { return sigma.cwiseMax(eps).cwiseMin(1.0 - eps); }

Matrix permute_symmetric(const Matrix& s, const std::vector<int>& perm) {
  Matrix out(s.rows(), s.cols());
  for (Eigen::Index j = 0; j < s.cols(); ++j)
    for (Eigen::Index i = 0; i < s.rows(); ++i) out(i, j) = s(perm[i], perm[j]);
  return out;
}

ManifoldFit project_to_manifold(const Matrix& sigma_tilde, int r) {
  const Eigen::Index k = sigma_tilde.rows();
  require(sigma_tilde.cols() == k && r >= 1 && r <= k, ErrorCode::DimensionMismatch,
          "project_to_manifold: need square input and 1 <= r <= K");
  require(is_symmetric(sigma_tilde), ErrorCode::AsymmetricInput, "project_to_manifold: input not symmetric");
  const EigenPairs eig = leading_eigenpairs(sigma_tilde, r);
  const Matrix truncated = symmetrize(eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose());

  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    try {
      ThetaSym start = theta_of_sigma(permute_symmetric(truncated, perm), r);
      const Matrix target = permute_symmetric(sigma_tilde, perm);
      const Eigen::Index p = k;
      const ResidualFunction f = [&](const Vector& x, Vector& residual, Matrix* jac) {
        try {
          const ThetaSym th = ThetaSym::from_vector(p, r, x);
          residual = vec(target - sigma_of_theta(th));
          if (jac != nullptr) *jac = dsigma(th);
          return true;
        } catch (const Error& e) {
          if (e.code() == ErrorCode::DomainViolation) return false;
          throw;
        }
      };
      const GaussNewtonResult gn = gauss_newton(start.vector(), f);
      return ManifoldFit{ThetaSym::from_vector(p, r, gn.x), perm, gn.iterations, gn.gradient_norm, gn.objective};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateTopBlock && e.code() != ErrorCode::TopBlockNotPD &&
          e.code() != ErrorCode::DomainViolation)
        throw;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  fail(ErrorCode::ProjectionFailed, "project_to_manifold: no row permutation admits a representer");
}

double sbm_log_likelihood(const ThetaSym& theta, const BlockCounts& counts) {
  require_counts_shape(theta, counts);
  const Matrix sigma = checked_probabilities(theta);
  double ll = 0.0;
  for (Eigen::Index t = 0; t < sigma.cols(); ++t)
    for (Eigen::Index s = 0; s < sigma.rows(); ++s)
      ll += counts.edges(s, t) * std::log(sigma(s, t)) +
            (counts.pairs(s, t) - counts.edges(s, t)) * std::log1p(-sigma(s, t));
  return ll;
}

Vector sbm_score(const ThetaSym& theta, const BlockCounts& counts) {
  require_counts_shape(theta, counts);
  const Matrix sigma = checked_probabilities(theta);
  const Eigen::Index k = theta.p();
  const Matrix jac = dsigma(theta);
  Vector score = Vector::Zero(theta.dim());
  for (Eigen::Index t = 0; t < k; ++t)
    for (Eigen::Index s = 0; s < k; ++s) {
      const double coef =
          (counts.edges(s, t) - counts.pairs(s, t) * sigma(s, t)) / (sigma(s, t) * (1.0 - sigma(s, t)));
      score += coef * jac.row(s + t * k).transpose();
    }
  return score;
}

Vector sbm_score(const ThetaSym& theta, const ClusterAssignment& tau, const Adjacency& a) {
  return sbm_score(theta, block_counts(a, tau));
}

Matrix sbm_fisher(const ThetaSym& theta, const BlockCounts& counts) {
  require_counts_shape(theta, counts);
  const Matrix sigma = checked_probabilities(theta);
  return weighted_gram(theta, sigma, [&](Eigen::Index s, Eigen::Index t) { return counts.pairs(s, t); });
}

Matrix sbm_fisher(const ThetaSym& theta, const ClusterAssignment& tau) {
  return sbm_fisher(theta, BlockCounts{Matrix::Zero(tau.k, tau.k), pair_counts(tau)});
}

ThetaSym one_step(const ThetaSym& theta_tilde, const BlockCounts& counts) {
  const Matrix fisher = sbm_fisher(theta_tilde, counts);
  const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(fisher, Eigen::EigenvaluesOnly).eigenvalues();
  require(ev.minCoeff() > 0.0 && ev.maxCoeff() / ev.minCoeff() <= kMaxFisherCondition, ErrorCode::SingularFisher,
          "one_step: Fisher information is singular or ill conditioned");
  const Vector step = fisher.ldlt().solve(sbm_score(theta_tilde, counts));
  return ThetaSym::from_vector(theta_tilde.p(), theta_tilde.r(), theta_tilde.vector() + step);
}

ThetaSym one_step(const ThetaSym& theta_tilde, const ClusterAssignment& tau_hat, const Adjacency& a) {
  return one_step(theta_tilde, block_counts(a, tau_hat));
}

Matrix asymptotic_cov_J(const ThetaSym& theta, const Vector& pi, const std::vector<int>& permutation) {
  const Eigen::Index k = theta.p();
  require(pi.size() == k && static_cast<Eigen::Index>(permutation.size()) == k, ErrorCode::DimensionMismatch,
          "asymptotic_cov_J: pi and permutation must have length K");
  const Matrix sigma = checked_probabilities(theta);
  Vector permuted(k);
  for (Eigen::Index t = 0; t < k; ++t) permuted(permutation[t]) = pi(t);
  return weighted_gram(theta, sigma,
                       [&](Eigen::Index s, Eigen::Index t) { return 0.5 * permuted(s) * permuted(t); });
}

ExperimentResult sbm_experiment(const SbmExperimentConfig& config) {
  const int k = static_cast<int>(config.sigma0.rows());
  const int r = config.r;
  ExperimentResult result;
  result.d = sym_dim(k, r);
  const Eigen::Index d = result.d;
  // Validate the model once before any work.
  for (int n : config.n_values) SbmModel(config.sigma0, balanced_assignment(n, config.pi), r, config.pi);

  const int reps = config.replicates;
  const int n_count = static_cast<int>(config.n_values.size());
  result.rows.resize(static_cast<std::size_t>(reps) * n_count);
  for (int ni = 0; ni < n_count; ++ni) {
    const int n = config.n_values[ni];
    const SbmModel model(config.sigma0, balanced_assignment(n, config.pi), r, config.pi);
    parallel_for(reps, [&](int rep) {
      ReplicateRecord rec;
      rec.replicate = rep;
      rec.m = n;
      rec.n = n;
      const std::uint64_t rep_seed = config.seed + static_cast<std::uint64_t>(rep);
      try {
        const Adjacency a = sample_adjacency(model, rep_seed, 2 * static_cast<std::uint64_t>(ni));
        const ClusterAssignment tau_hat =
            spectral_cluster_sbm(a, r, k, rep_seed ^ (0xC1A55ULL << 32 | static_cast<std::uint64_t>(ni)), config.kmeans);
        const Alignment align = align_labels(tau_hat, model.tau0);
        rec.aligned_hamming = align.hamming;
        rec.excluded = align.hamming != 0;

        const Matrix sigma_tilde = clip_probabilities(block_mean_estimator(a, tau_hat));
        const ManifoldFit fit = project_to_manifold(sigma_tilde, r);
        // Relabel so that fitted coordinates are the working coordinates.
        const std::vector<int> inv = inverse_permutation(fit.permutation);
        std::vector<int> labels(tau_hat.labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = inv[tau_hat.labels[i]];
        const ClusterAssignment tau_work(std::move(labels), k);
        std::vector<int> omega(k);
        for (int t = 0; t < k; ++t) omega[t] = inv[align.permutation[t]];

        const ThetaSym theta_hat = one_step(fit.theta, block_counts(a, tau_work));
        const Matrix sigma0_pi = permute_symmetric(config.sigma0, inverse_permutation(omega));
        const ThetaSym theta0_pi = theta_of_sigma(sigma0_pi, r);
        const Matrix j = asymptotic_cov_J(theta0_pi, config.pi, omega);
        rec.z = static_cast<double>(n) * sym_sqrt(j) * (theta_hat.vector() - theta0_pi.vector());
        rec.mse_estimator = n * (sigma_of_theta(theta_hat) - sigma0_pi).squaredNorm();
        rec.mse_naive = n * (permute_symmetric(sigma_tilde, fit.permutation) - sigma0_pi).squaredNorm();
      } catch (const Error&) {
        rec.failed = true;
        rec.excluded = true;
        rec.z = Vector::Constant(d, std::numeric_limits<double>::quiet_NaN());
        rec.mse_estimator = std::numeric_limits<double>::quiet_NaN();
        rec.mse_naive = std::numeric_limits<double>::quiet_NaN();
      }
      result.rows[static_cast<std::size_t>(ni) * reps + rep] = std::move(rec);
    });
    const auto first = result.rows.begin() + static_cast<std::ptrdiff_t>(ni) * reps;
    MonteCarloSummary summary = summarize(std::vector<ReplicateRecord>(first, first + reps), d);
    summary.m = n;
    summary.n = n;
    result.summaries.push_back(std::move(summary));
  }
  return result;
}

}  // namespace lowrank
