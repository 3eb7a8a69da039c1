#include "lowrank/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lowrank/errors.hpp"
#include "lowrank/rng.hpp"

namespace lowrank {

ClusterAssignment::ClusterAssignment(std::vector<int> l, int kk) : labels(std::move(l)), k(kk) {
  require(k >= 1, ErrorCode::DimensionMismatch, "ClusterAssignment: k must be positive");
  for (int v : labels) require(v >= 0 && v < k, ErrorCode::DimensionMismatch, "ClusterAssignment: label out of range");
}

std::vector<int> ClusterAssignment::counts() const {
  std::vector<int> c(k, 0);
  for (int v : labels) ++c[v];
  return c;
}

namespace {

double squared_distance(const Matrix& rows, Eigen::Index i, const Matrix& centroids, Eigen::Index c) {
  return (rows.row(i) - centroids.row(c)).squaredNorm();
}

Matrix seed_plus_plus(const Matrix& rows, int k, Philox4x32& rng) {
  const Eigen::Index n = rows.rows();
  Matrix centroids(k, rows.cols());
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<char> chosen(n, 0);
  Eigen::Index pick = static_cast<Eigen::Index>(rng.below(n));
  for (int c = 0; c < k; ++c) {
    if (c > 0) {
      double total = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) total += dist[i];
      if (total > 0.0) {
        const double target = rng.uniform() * total;
        double acc = 0.0;
        pick = n - 1;
        for (Eigen::Index i = 0; i < n; ++i) {
          acc += dist[i];
          if (acc >= target && dist[i] > 0.0) {
            pick = i;
            break;
          }
        }
      } else {
        // All remaining points coincide with a center; take an unused index.
        std::vector<Eigen::Index> unused;
        for (Eigen::Index i = 0; i < n; ++i)
          if (!chosen[i]) unused.push_back(i);
        pick = unused[rng.below(unused.size())];
      }
    }
    chosen[pick] = 1;
    centroids.row(c) = rows.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) dist[i] = std::min(dist[i], squared_distance(rows, i, centroids, c));
  }
  return centroids;
}

struct LloydState {
  std::vector<int> labels;
  Matrix centroids;
  double objective;
  int iterations;
};

bool assign(const Matrix& rows, const Matrix& centroids, std::vector<int>& labels) {
  bool changed = false;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    int best = 0;
    double best_d = squared_distance(rows, i, centroids, 0);
    for (Eigen::Index c = 1; c < centroids.rows(); ++c) {
      const double d = squared_distance(rows, i, centroids, c);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    if (labels[i] != best) {
      labels[i] = best;
      changed = true;
    }
  }
  return changed;
}

// Recomputes centroids as label means; an empty cluster takes over the point
// farthest from its current centroid. Returns true when a repair happened.
bool update_centroids(const Matrix& rows, std::vector<int>& labels, Matrix& centroids) {
  const int k = static_cast<int>(centroids.rows());
  bool repaired = false;
  for (int pass = 0; pass < k; ++pass) {
    std::vector<int> counts(k, 0);
    for (int v : labels) ++counts[v];
    const auto empty = std::find(counts.begin(), counts.end(), 0);
    if (empty == counts.end()) break;
    Eigen::Index far = -1;
    double far_d = -1.0;
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      if (counts[labels[i]] <= 1) continue;
      const double d = squared_distance(rows, i, centroids, labels[i]);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    const int c = static_cast<int>(empty - counts.begin());
    labels[far] = c;
    centroids.row(c) = rows.row(far);
    repaired = true;
  }
  Matrix sums = Matrix::Zero(k, rows.cols());
  std::vector<int> counts(k, 0);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    sums.row(labels[i]) += rows.row(i);
    ++counts[labels[i]];
  }
  for (int c = 0; c < k; ++c) centroids.row(c) = sums.row(c) / static_cast<double>(counts[c]);
  return repaired;
}

double objective_of(const Matrix& rows, const std::vector<int>& labels, const Matrix& centroids) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) total += squared_distance(rows, i, centroids, labels[i]);
  return total;
}

LloydState lloyd(const Matrix& rows, Matrix centroids, int max_iterations) {
  LloydState st{std::vector<int>(rows.rows(), -1), std::move(centroids), 0.0, 0};
  for (int it = 0; it < max_iterations; ++it) {
    st.iterations = it + 1;
    const bool changed = assign(rows, st.centroids, st.labels);
    if (!changed) break;
    update_centroids(rows, st.labels, st.centroids);
  }
  st.objective = objective_of(rows, st.labels, st.centroids);
  return st;
}

}  // namespace

KmeansResult kmeans(const Matrix& rows, int k, std::uint64_t seed, const KmeansOptions& options) {
  require(k >= 1, ErrorCode::DimensionMismatch, "kmeans: k must be positive");
  require(rows.rows() >= k, ErrorCode::TooFewPoints, "kmeans: fewer points than clusters");
  require(options.restarts >= 1 && options.max_iterations >= 1, ErrorCode::DimensionMismatch,
          "kmeans: restarts and iterations must be positive");
  KmeansResult best;
  best.objective = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < options.restarts; ++restart) {
    Philox4x32 rng(seed, static_cast<std::uint64_t>(restart));
    LloydState st = lloyd(rows, seed_plus_plus(rows, k, rng), options.max_iterations);
    if (st.objective < best.objective) {
      best.assignment = ClusterAssignment(std::move(st.labels), k);
      best.centroids = std::move(st.centroids);
      best.objective = st.objective;
      best.restart = restart;
      best.iterations = st.iterations;
    }
  }
  return best;
}

int hamming_distance(const ClusterAssignment& a, const ClusterAssignment& b) {
  require(a.size() == b.size(), ErrorCode::DimensionMismatch, "hamming_distance: lengths differ");
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a.labels[i] != b.labels[i];
  return d;
}

Alignment align_labels(const ClusterAssignment& est, const ClusterAssignment& truth) {
  require(est.size() == truth.size(), ErrorCode::DimensionMismatch, "align_labels: lengths differ");
  require(est.k == truth.k, ErrorCode::DimensionMismatch, "align_labels: cluster counts differ");
  const int k = truth.k;
  require(k <= 10, ErrorCode::TooManyClusters, "align_labels: exhaustive search limited to k <= 10");
  // agree[e][t] counts items with estimated label e and true label t.
  std::vector<int> agree(k * k, 0);
  for (std::size_t i = 0; i < est.size(); ++i) ++agree[est.labels[i] * k + truth.labels[i]];
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  Alignment best{perm, std::numeric_limits<int>::max()};
  const int n = static_cast<int>(est.size());
  do {
    int matched = 0;
    for (int t = 0; t < k; ++t) matched += agree[perm[t] * k + t];
    if (n - matched < best.hamming) {
      best.hamming = n - matched;
      best.permutation = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

ClusterAssignment balanced_assignment(int n, const Vector& weights) {
  const int k = static_cast<int>(weights.size());
  require(k >= 1 && n >= k, ErrorCode::TooFewPoints, "balanced_assignment: need n >= k >= 1");
  require((weights.array() > 0.0).all(), ErrorCode::DimensionMismatch, "balanced_assignment: weights must be positive");
  const Vector w = weights / weights.sum();
  std::vector<int> sizes(k);
  std::vector<std::pair<double, int>> remainders;
  int assigned = 0;
  for (int c = 0; c < k; ++c) {
    const double exact = w(c) * n;
    sizes[c] = static_cast<int>(std::floor(exact));
    assigned += sizes[c];
    remainders.emplace_back(exact - sizes[c], c);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int j = 0; assigned < n; ++j, ++assigned) ++sizes[remainders[j].second];
  std::vector<int> labels;
  labels.reserve(n);
  for (int c = 0; c < k; ++c) labels.insert(labels.end(), sizes[c], c);
  return ClusterAssignment(std::move(labels), k);
}

}  // namespace lowrank
