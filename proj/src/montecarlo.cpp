#include "lowrank/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

namespace lowrank {

MonteCarloSummary summarize(const std::vector<ReplicateRecord>& records, Eigen::Index d) {
  MonteCarloSummary s;
  if (!records.empty()) {
    s.m = records.front().m;
    s.n = records.front().n;
  }
  s.mean = Vector::Zero(d);
  s.covariance = Matrix::Zero(d, d);
  s.coverage = Vector::Zero(d);
  std::vector<const ReplicateRecord*> used;
  for (const auto& rec : records) {
    ++s.replicates;
    if (rec.failed) ++s.failed;
    if (rec.excluded) {
      ++s.excluded;
      continue;
    }
    used.push_back(&rec);
  }
  s.included = static_cast<int>(used.size());
  if (used.empty()) return s;

  const double count = static_cast<double>(used.size());
  for (const auto* rec : used) {
    s.mean += rec->z;
    s.mean_mse_estimator += rec->mse_estimator;
    s.mean_mse_naive += rec->mse_naive;
    for (Eigen::Index j = 0; j < d; ++j) s.coverage(j) += std::abs(rec->z(j)) <= kNormal975 ? 1.0 : 0.0;
  }
  s.mean /= count;
  s.mean_mse_estimator /= count;
  s.mean_mse_naive /= count;
  s.coverage /= count;
  s.mean_difference = s.mean_mse_estimator - s.mean_mse_naive;

  if (used.size() >= 2) {
    double ss = 0.0;
    for (const auto* rec : used) {
      const Vector c = rec->z - s.mean;
      s.covariance += c * c.transpose();
      const double diff = rec->mse_estimator - rec->mse_naive - s.mean_difference;
      ss += diff * diff;
    }
    s.covariance /= count - 1.0;
    s.difference_std_error = std::sqrt(ss / (count - 1.0) / count);
    if (s.difference_std_error > 0.0) {
      s.paired_t = s.mean_difference / s.difference_std_error;
      const boost::math::students_t dist(count - 1.0);
      s.paired_p_value = boost::math::cdf(dist, s.paired_t);
    } else {
      s.paired_p_value = s.mean_difference < 0.0 ? 0.0 : 1.0;
    }
  }
  const Matrix dev = s.covariance - Matrix::Identity(d, d);
  s.cov_opnorm_dev_from_I = d == 0 ? 0.0 : Eigen::SelfAdjointEigenSolver<Matrix>(symmetrize(dev), Eigen::EigenvaluesOnly)
                                                .eigenvalues()
                                                .cwiseAbs()
                                                .maxCoeff();
  return s;
}

void parallel_for(int count, const std::function<void(int)>& body) {
  const int workers = std::max(1, std::min<int>(count, static_cast<int>(std::thread::hardware_concurrency())));
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace lowrank
