#pragma once

#include <functional>
#include <vector>

#include "lowrank/matkit.hpp"

namespace lowrank {

struct ReplicateRecord {
  int replicate = 0;
  int m = 0;  // row count; unused by single-index experiments
  int n = 0;
  int aligned_hamming = 0;
  int aligned_hamming_cols = 0;
  bool excluded = false;  // clustering not exact or pipeline failure
  bool failed = false;    // pipeline raised a numerical error
  Vector z;               // standardized error; empty when failed
  double mse_estimator = 0.0;
  double mse_naive = 0.0;
};

struct MonteCarloSummary {
  int m = 0;
  int n = 0;
  int replicates = 0;
  int included = 0;
  int excluded = 0;
  int failed = 0;
  Vector mean;
  Matrix covariance;
  double cov_opnorm_dev_from_I = 0.0;
  Vector coverage;
  // Means over the included replicates.
  double mean_mse_estimator = 0.0;
  double mean_mse_naive = 0.0;
  // Paired comparison of mse_estimator - mse_naive over the included set.
  double mean_difference = 0.0;
  double difference_std_error = 0.0;
  double paired_t = 0.0;
  // One-sided p-value for mean(mse_estimator) < mean(mse_naive).
  double paired_p_value = 1.0;
};

// Nominal two-sided 95% normal interval half-width.
inline constexpr double kNormal975 = 1.959963984540054;

struct ExperimentResult {
  Eigen::Index d = 0;
  std::vector<ReplicateRecord> rows;  // grouped by cell, replicate order within
  std::vector<MonteCarloSummary> summaries;
};

// Summarizes one experimental cell; m and n are taken from the first record.
MonteCarloSummary summarize(const std::vector<ReplicateRecord>& records, Eigen::Index d);

// Runs body(i) for i in [0, count) on a small thread pool. Results must be
// written to per-index slots so output order never depends on scheduling.
void parallel_for(int count, const std::function<void(int)>& body);

}  // namespace lowrank
