#pragma once

#include <cstdint>
#include <vector>

#include "lowrank/matkit.hpp"

namespace lowrank {

// Labels are 0-based: every entry lies in [0, k).
struct ClusterAssignment {
  std::vector<int> labels;
  int k = 1;

  ClusterAssignment() = default;
  ClusterAssignment(std::vector<int> labels, int k);
  std::size_t size() const { return labels.size(); }
  std::vector<int> counts() const;
};

struct KmeansResult {
  ClusterAssignment assignment;
  Matrix centroids;  // k x r
  double objective = 0.0;
  int restart = 0;
  int iterations = 0;
};

struct KmeansOptions {
  int restarts = 20;
  int max_iterations = 200;
};

KmeansResult kmeans(const Matrix& rows, int k, std::uint64_t seed, const KmeansOptions& options = {});

struct Alignment {
  // permutation[t] is the estimated label matched to true label t.
  std::vector<int> permutation;
  int hamming = 0;
};

int hamming_distance(const ClusterAssignment& a, const ClusterAssignment& b);
Alignment align_labels(const ClusterAssignment& est, const ClusterAssignment& truth);

// Contiguous labels with class sizes from largest-remainder rounding of n * w.
ClusterAssignment balanced_assignment(int n, const Vector& weights);

}  // namespace lowrank
