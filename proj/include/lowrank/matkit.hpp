#pragma once

#include <Eigen/Dense>

// Matrix-calculus kernels. All matrices are Eigen column-major dense
// matrices; vec() always stacks columns.
namespace lowrank {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols);

// Symmetry tolerance used by vech: ||S - S^T||_max <= 1e-10 (1 + ||S||_max).
bool is_symmetric(const Matrix& s);

// Lower triangle stacked column by column: S11, S21, ..., Sr1, S22, ...
Vector vech(const Matrix& s);
Matrix unvech(const Vector& v, Eigen::Index r);
Eigen::Index vech_length(Eigen::Index r);
// Position of entry (i, j), i >= j, inside vech of an r x r matrix.
Eigen::Index vech_index(Eigen::Index i, Eigen::Index j, Eigen::Index r);

// K_pq with K_pq vec(M) = vec(M^T) for every p x q matrix M.
Matrix commutation_matrix(Eigen::Index p, Eigen::Index q);
// D_r with D_r vech(S) = vec(S) for every symmetric r x r matrix S.
Matrix duplication_matrix(Eigen::Index r);
Matrix duplication_pinv(Eigen::Index r);

Matrix kron(const Matrix& a, const Matrix& b);

struct SinThetaResult {
  // Canonical angles, ascending (cosines nonincreasing).
  Vector angles;
  double dist_spectral = 0.0;
  double dist_frobenius = 0.0;
};

bool is_orthonormal(const Matrix& u, double tol = 1e-10);
SinThetaResult sin_theta(const Matrix& u0, const Matrix& u);

double spectral_norm(const Matrix& m);
double min_singular_value(const Matrix& m);
// Symmetric square root and inverse square root of a symmetric PSD/PD matrix.
Matrix sym_sqrt(const Matrix& s);
Matrix sym_inv_sqrt(const Matrix& s);
Matrix symmetrize(const Matrix& s);
// p x r matrix with the identity on top and zeros below.
Matrix identity_frame(Eigen::Index p, Eigen::Index r);

}  // namespace lowrank
