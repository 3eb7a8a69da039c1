#pragma once

#include <cstdint>

#include "lowrank/matkit.hpp"

namespace lowrank {

struct EigenPairs {
  // Sorted by decreasing magnitude.
  Vector values;
  Matrix vectors;
};

struct SingularTriplets {
  Vector values;  // descending
  Matrix left;
  Matrix right;
};

// The r eigenpairs of largest magnitude of a symmetric matrix. Small inputs
// use a dense eigensolver; large ones use seeded block subspace iteration with
// Rayleigh-Ritz extraction. Each eigenvector is signed so that its entry of
// largest magnitude is positive.
EigenPairs leading_eigenpairs(const Matrix& s, Eigen::Index r, std::uint64_t seed = 0);

// The r leading singular triplets, with the same strategy.
SingularTriplets leading_singular_triplets(const Matrix& y, Eigen::Index r, std::uint64_t seed = 0);

}  // namespace lowrank
