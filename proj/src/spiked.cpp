#include "lowrank/spiked.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "lowrank/errors.hpp"
#include "lowrank/montecarlo.hpp"
#include "lowrank/rng.hpp"

namespace lowrank {

namespace {

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

Eigen::LLT<Matrix> checked_cholesky(const Matrix& omega, const char* where) {
  Eigen::LLT<Matrix> llt(symmetrize(omega));
  require(llt.info() == Eigen::Success, ErrorCode::NotPositiveDefinite, std::string(where) + ": matrix not PD");
  return llt;
}

bool is_sorted_unique(const std::vector<int>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] <= v[i - 1]) return false;
  return true;
}

// Calls visit(subset) for every subset of pool with size <= max_size, by size
// then lexicographically.
template <typename Visit>
void for_each_subset(const std::vector<int>& pool, int max_size, Visit visit) {
  const int c = static_cast<int>(pool.size());
  for (int k = 0; k <= std::min(max_size, c); ++k) {
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      std::vector<int> subset(k);
      for (int i = 0; i < k; ++i) subset[i] = pool[idx[i]];
      visit(subset);
      int pos = k - 1;
      while (pos >= 0 && idx[pos] == c - k + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }
  }
}

}  // namespace

SpikedModel::SpikedModel(ThetaSym t, int nn, std::vector<int> s) : theta0(std::move(t)), n(nn), support0(std::move(s)) {
  const Eigen::Index q = p() - r();
  require(n >= 1, ErrorCode::DimensionMismatch, "SpikedModel: n must be positive");
  require(is_sorted_unique(support0), ErrorCode::SupportViolation, "SpikedModel: support must be sorted and unique");
  for (int j : support0) require(j >= 0 && j < q, ErrorCode::SupportViolation, "SpikedModel: support index out of range");
  const Matrix a0 = theta0.phi().matrix();
  for (Eigen::Index j = 0; j < q; ++j) {
    if (std::binary_search(support0.begin(), support0.end(), static_cast<int>(j))) continue;
    require((a0.row(j).array() == 0.0).all(), ErrorCode::SupportViolation,
            "SpikedModel: rows of A0 outside the support must be zero");
  }
  checked_cholesky(theta0.m(), "SpikedModel M0");
  checked_cholesky(omega_of_theta(theta0), "SpikedModel Omega0");
}

Matrix omega_of_theta(const ThetaSym& theta) {
  const Matrix omega = sigma_of_theta(theta) + Matrix::Identity(theta.p(), theta.p());
  checked_cholesky(omega, "omega_of_theta");
  return omega;
}

GaussianSample sample_gaussian(const Matrix& omega, int n, std::uint64_t seed, std::uint64_t stream) {
  require(n >= 1, ErrorCode::DimensionMismatch, "sample_gaussian: n must be positive");
  const Eigen::LLT<Matrix> llt = checked_cholesky(omega, "sample_gaussian");
  const Eigen::Index p = omega.rows();
  Philox4x32 rng(seed, stream);
  Matrix z(p, n);
  for (int j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < p; ++i) z(i, j) = rng.normal();
  GaussianSample out;
  out.data = llt.matrixL() * z;
  out.omega_hat = symmetrize(out.data * out.data.transpose() / static_cast<double>(n));
  return out;
}

double log_likelihood(const Matrix& omega, const Matrix& omega_hat, int n) {
  const Eigen::LLT<Matrix> llt = checked_cholesky(omega, "log_likelihood");
  const Eigen::Index p = omega.rows();
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double trace = llt.solve(omega_hat).trace();
  return -0.5 * n * (p * std::log(2.0 * std::numbers::pi) + logdet) - 0.5 * n * trace;
}

Matrix fisher_spiked(const ThetaSym& theta0) {
  const Matrix omega = omega_of_theta(theta0);
  const Matrix inv = checked_cholesky(omega, "fisher_spiked").solve(Matrix::Identity(omega.rows(), omega.cols()));
  const Matrix jac = dsigma(theta0);
  const Matrix fisher = symmetrize(0.5 * jac.transpose() * kron(inv, inv) * jac);
  checked_cholesky(fisher, "fisher_spiked information");
  return fisher;
}

double log_support_size_prior(int t, Eigen::Index p, Eigen::Index r, double a, int n) {
  const Eigen::Index q = p - r;
  require(t >= 0 && t <= q, ErrorCode::SupportViolation, "support size out of range");
  const double log_ratio = -static_cast<double>(r) * std::log(static_cast<double>(n)) -
                           a * std::log(static_cast<double>(std::max<Eigen::Index>(q, 1)));
  // log z_n as a finite geometric sum, accumulated with a max shift (term 0 is largest).
  double z = 0.0;
  for (Eigen::Index u = 0; u <= q; ++u) z += std::exp(log_ratio * u);
  return log_ratio * t - std::log(z);
}

double prior_log_density(const ThetaSym& theta, const std::vector<int>& support, double a, int n) {
  const Eigen::Index q = theta.p() - theta.r();
  require(is_sorted_unique(support), ErrorCode::SupportViolation, "prior_log_density: support must be sorted");
  for (int j : support) require(j >= 0 && j < q, ErrorCode::SupportViolation, "prior_log_density: index out of range");
  const Matrix amat = theta.phi().matrix();
  double l1 = 0.0;
  for (Eigen::Index j = 0; j < q; ++j) {
    const bool in = std::binary_search(support.begin(), support.end(), static_cast<int>(j));
    if (!in) {
      require((amat.row(j).array() == 0.0).all(), ErrorCode::SupportViolation,
              "prior_log_density: rows of A outside S must be zero");
    } else {
      l1 += amat.row(j).cwiseAbs().sum();
    }
  }
  Eigen::LLT<Matrix> llt(theta.m());
  require(llt.info() == Eigen::Success, ErrorCode::DomainViolation, "prior_log_density: M must be positive definite");
  const int t = static_cast<int>(support.size());
  return log_support_size_prior(t, theta.p(), theta.r(), a, n) - log_binomial(static_cast<int>(q), t) - 2.0 * l1 -
         2.0 * theta.mu().cwiseAbs().sum();
}

GammaBounds gamma_bounds(int support_size, Eigen::Index r) {
  if (support_size == 0) return {1.0, 1.0};
  const double k = static_cast<double>(r) * support_size;
  return {std::exp(-0.5 * k * std::log(k) - (2.0 - std::numbers::ln2) * k), 1.0};
}

GammaTable::GammaTable(std::uint64_t seed, int draws) : seed_(seed), draws_(draws) {
  require(draws_ >= 1, ErrorCode::DimensionMismatch, "GammaTable: draws must be positive");
}

GammaEstimate GammaTable::get(int support_size, Eigen::Index r) {
  std::lock_guard<std::mutex> lock(mutex_);
  const auto key = std::make_pair(support_size, r);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  GammaEstimate est;
  if (support_size == 0) {
    est = {1.0, 0.0, 0};
  } else {
    Philox4x32 rng(seed_, static_cast<std::uint64_t>(support_size) << 16 | static_cast<std::uint64_t>(r));
    Matrix a(support_size, r);
    long hits = 0;
    for (int d = 0; d < draws_; ++d) {
      for (Eigen::Index j = 0; j < r; ++j)
        for (int i = 0; i < support_size; ++i) {
          // Laplace with rate 2 by inversion of a symmetric exponential.
          const double e = -0.5 * std::log(rng.uniform());
          a(i, j) = (rng() & 1u) != 0u ? e : -e;
        }
      hits += spectral_norm(a) < 1.0;
    }
    const double phat = static_cast<double>(hits) / draws_;
    est = {phat, std::sqrt(phat * (1.0 - phat) / draws_), draws_};
  }
  cache_.emplace(key, est);
  return est;
}

GammaCertificates gamma_bounds_certificate(const GammaEstimate& estimate, int support_size, Eigen::Index r) {
  const GammaBounds b = gamma_bounds(support_size, r);
  return {Certificate::at_least("spiked.gamma_lower", estimate.value, b.lower),
          Certificate::at_most("spiked.gamma_upper", estimate.value, b.upper)};
}

std::vector<Eigen::Index> support_coordinates(Eigen::Index p, Eigen::Index r, const std::vector<int>& support) {
  const Eigen::Index q = p - r;
  std::vector<Eigen::Index> coords;
  for (Eigen::Index c = 0; c < r; ++c)
    for (int j : support) coords.push_back(j + c * q);
  std::sort(coords.begin(), coords.end());
  for (Eigen::Index k = 0; k < vech_length(r); ++k) coords.push_back(q * r + k);
  return coords;
}

Matrix support_selector(Eigen::Index p, Eigen::Index r, const std::vector<int>& support) {
  const auto coords = support_coordinates(p, r, support);
  Matrix f = Matrix::Zero(sym_dim(p, r), static_cast<Eigen::Index>(coords.size()));
  for (std::size_t k = 0; k < coords.size(); ++k) f(coords[k], static_cast<Eigen::Index>(k)) = 1.0;
  return f;
}

LimitPosterior limit_posterior(const Matrix& omega_hat, const SpikedModel& model, const LimitPosteriorOptions& options,
                               GammaTable& gamma) {
  const Eigen::Index p = model.p();
  const Eigen::Index r = model.r();
  const Eigen::Index q = p - r;
  const int s0 = static_cast<int>(model.support0.size());
  require(omega_hat.rows() == p && omega_hat.cols() == p, ErrorCode::DimensionMismatch,
          "limit_posterior: sample covariance has the wrong shape");
  require(options.cap >= s0 && options.cap <= q, ErrorCode::SupportViolation,
          "limit_posterior: cap must satisfy |S0| <= cap <= p - r");
  std::vector<int> pool;
  for (int j = 0; j < q; ++j)
    if (!std::binary_search(model.support0.begin(), model.support0.end(), j)) pool.push_back(j);
  double count = 0.0;
  for (int k = 0; k <= std::min<int>(options.cap - s0, static_cast<int>(pool.size())); ++k)
    count += std::exp(log_binomial(static_cast<int>(pool.size()), k));
  require(count <= static_cast<double>(kMaxSupportEnumeration) + 0.5, ErrorCode::EnumerationTooLarge,
          "limit_posterior: more than 1e5 candidate supports");

  const int n = model.n;
  const Matrix omega0 = omega_of_theta(model.theta0);
  const Matrix whiten = sym_inv_sqrt(omega0);
  const Matrix w_half = kron(whiten, whiten);
  const double root = std::sqrt(0.5 * n);
  const Matrix z0 = root * w_half * dsigma(model.theta0);
  const Vector eps = root * w_half * vec(omega_hat - omega0);
  const Vector theta0 = model.theta0.vector();

  LimitPosterior lp;
  lp.p = p;
  lp.r = r;
  lp.theta0 = theta0;
  for_each_subset(pool, options.cap - s0, [&](const std::vector<int>& extra) {
    LimitComponent comp;
    comp.support = model.support0;
    comp.support.insert(comp.support.end(), extra.begin(), extra.end());
    std::sort(comp.support.begin(), comp.support.end());
    comp.coordinates = support_coordinates(p, r, comp.support);
    const Eigen::Index ds = static_cast<Eigen::Index>(comp.coordinates.size());
    Matrix zs(z0.rows(), ds);
    Vector theta0s(ds);
    for (Eigen::Index k = 0; k < ds; ++k) {
      zs.col(k) = z0.col(comp.coordinates[k]);
      theta0s(k) = theta0(comp.coordinates[k]);
    }
    comp.information = symmetrize(zs.transpose() * zs);
    const Eigen::LLT<Matrix> llt(comp.information);
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(comp.information, Eigen::EigenvaluesOnly).eigenvalues();
    require(llt.info() == Eigen::Success && ev.minCoeff() > 1e-12 * ev.maxCoeff(), ErrorCode::SingularFisher,
            "limit_posterior: restricted information is singular");
    comp.mean = theta0s + llt.solve(zs.transpose() * eps);
    comp.covariance = symmetrize(llt.solve(Matrix::Identity(ds, ds)));
    const double logdet_info = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    const int t = static_cast<int>(comp.support.size());
    comp.log_weight = log_support_size_prior(t, p, r, options.a, n) - log_binomial(static_cast<int>(q), t) -
                      std::log(gamma.get(t, r).value) +
                      0.5 * (ds * std::log(2.0 * std::numbers::pi) - logdet_info) +
                      0.5 * comp.mean.dot(comp.information * comp.mean);
    require(std::isfinite(comp.log_weight), ErrorCode::EstimateUnavailable,
            "limit_posterior: component weight is not finite (gamma estimate may be zero)");
    lp.components.push_back(std::move(comp));
  });

  double top = -std::numeric_limits<double>::infinity();
  for (const auto& c : lp.components) top = std::max(top, c.log_weight);
  double total = 0.0;
  for (auto& c : lp.components) {
    c.weight = std::exp(c.log_weight - top);
    total += c.weight;
  }
  for (auto& c : lp.components) c.weight /= total;
  return lp;
}

std::vector<Vector> sample_limit_posterior(const LimitPosterior& lp, int draws, std::uint64_t seed) {
  require(!lp.components.empty(), ErrorCode::DimensionMismatch, "sample_limit_posterior: no components");
  Philox4x32 rng(seed, 0);
  std::vector<Matrix> factors;
  for (const auto& c : lp.components) factors.push_back(Eigen::LLT<Matrix>(c.covariance).matrixL());
  const Eigen::Index d = sym_dim(lp.p, lp.r);
  std::vector<Vector> out;
  out.reserve(draws);
  for (int k = 0; k < draws; ++k) {
    const double u = rng.uniform();
    std::size_t idx = 0;
    double acc = lp.components[0].weight;
    while (u > acc && idx + 1 < lp.components.size()) acc += lp.components[++idx].weight;
    const auto& comp = lp.components[idx];
    Vector z(comp.mean.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
    const Vector local = comp.mean + factors[idx] * z;
    Vector theta = Vector::Zero(d);
    for (std::size_t i = 0; i < comp.coordinates.size(); ++i) theta(comp.coordinates[i]) = local(static_cast<Eigen::Index>(i));
    out.push_back(std::move(theta));
  }
  return out;
}

double lan_remainder(const ThetaSym& theta, const ThetaSym& theta0, const Matrix& omega_hat, int n) {
  require(theta.p() == theta0.p() && theta.r() == theta0.r(), ErrorCode::DimensionMismatch,
          "lan_remainder: dimensions differ");
  const Matrix omega = omega_of_theta(theta);
  const Matrix omega0 = omega_of_theta(theta0);
  const Matrix inv0 = checked_cholesky(omega0, "lan_remainder").solve(Matrix::Identity(omega0.rows(), omega0.cols()));
  const Vector delta = theta.vector() - theta0.vector();
  const Vector direction = dsigma(theta0) * delta;  // vec of the linearized change in Omega
  const Matrix dmat = unvec(direction, omega0.rows(), omega0.cols());
  // vec(X)^T (inv0 kron inv0) vec(Y) = tr(inv0 X inv0 Y) for symmetric X.
  const double linear = 0.5 * n * (inv0 * (omega_hat - omega0) * inv0 * dmat).trace();
  const double quadratic = 0.25 * n * (inv0 * dmat * inv0 * dmat).trace();
  const double diff = log_likelihood(omega, omega_hat, n) - log_likelihood(omega0, omega_hat, n);
  return diff - linear + quadratic;
}

double sin_theta_tail(const std::vector<Vector>& draws, const Matrix& u0, double m_const, int s, Eigen::Index p,
                      int n) {
  if (draws.empty()) return 0.0;
  const Eigen::Index pp = u0.rows();
  const Eigen::Index r = u0.cols();
  const double threshold = m_const * std::sqrt(s * std::log(static_cast<double>(p)) / n);
  int exceed = 0;
  for (const auto& theta : draws) {
    try {
      const ThetaSym th = ThetaSym::from_vector(pp, r, theta);
      exceed += sin_theta(u0, cayley_map(th.phi()).matrix()).dist_spectral > threshold;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DomainViolation) throw;
      ++exceed;
    }
  }
  return static_cast<double>(exceed) / static_cast<double>(draws.size());
}

}  // namespace lowrank

namespace lowrank {

SpikedStudyResult spiked_study(const SpikedStudyConfig& config, GammaTable& gamma) {
  require(config.datasets >= 0, ErrorCode::DimensionMismatch, "spiked_study: datasets must be nonnegative");
  require(config.draws >= 1, ErrorCode::DimensionMismatch, "spiked_study: draws must be positive");
  const Matrix omega0 = omega_of_theta(config.theta0);
  const Matrix u0 = cayley_map(config.theta0.phi()).matrix();
  const Eigen::Index p = config.theta0.p();
  const int s = static_cast<int>(config.support0.size());
  SpikedStudyResult result;

  for (const int n : config.tail_n_values) {
    const SpikedModel model(config.theta0, n, config.support0);
    std::vector<SpikedTailRecord> rows(static_cast<std::size_t>(config.datasets));
    parallel_for(config.datasets, [&](int k) {
      const std::uint64_t data_seed = config.seed + static_cast<std::uint64_t>(k);
      const GaussianSample sample = sample_gaussian(omega0, n, data_seed, static_cast<std::uint64_t>(n));
      const LimitPosterior lp = limit_posterior(sample.omega_hat, model, {config.cap, config.a}, gamma);
      SpikedTailRecord& rec = rows[static_cast<std::size_t>(k)];
      rec.n = n;
      rec.dataset = k;
      rec.components = static_cast<int>(lp.components.size());
      for (const auto& c : lp.components) {
        rec.weight_sum += c.weight;
        if (c.support == config.support0) rec.weight_true_support = c.weight;
      }
      const auto draws = sample_limit_posterior(lp, config.draws, data_seed ^ (0xD7A5ULL << 32 | static_cast<std::uint64_t>(n)));
      rec.tail_fraction = sin_theta_tail(draws, u0, config.m_const, std::max(s, 1), p, n);
    });
    result.tail.insert(result.tail.end(), rows.begin(), rows.end());
  }

  for (const int n : config.lan_n_values) {
    std::vector<LanRecord> rows(static_cast<std::size_t>(config.datasets));
    parallel_for(config.datasets, [&](int k) {
      const std::uint64_t data_seed = config.seed + static_cast<std::uint64_t>(k);
      const GaussianSample sample = sample_gaussian(omega0, n, data_seed, 0x1a40000ULL + static_cast<std::uint64_t>(n));
      Philox4x32 rng(data_seed, 0x1a50000ULL + static_cast<std::uint64_t>(n));
      Vector direction(config.theta0.dim());
      for (Eigen::Index i = 0; i < direction.size(); ++i) direction(i) = rng.normal();
      direction /= direction.norm();
      const Vector theta = config.theta0.vector() + direction / std::sqrt(static_cast<double>(n));
      const ThetaSym alt = ThetaSym::from_vector(p, config.theta0.r(), theta);
      rows[static_cast<std::size_t>(k)] = {n, k, std::abs(lan_remainder(alt, config.theta0, sample.omega_hat, n))};
    });
    result.lan.insert(result.lan.end(), rows.begin(), rows.end());
  }
  return result;
}

}  // namespace lowrank
