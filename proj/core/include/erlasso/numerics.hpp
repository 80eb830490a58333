#pragma once

#include <Eigen/Dense>
#include <vector>

#include "erlasso/errors.hpp"

namespace erlasso::numerics {

struct SpectralSummary {
  double sigma_min = 0.0;          // smallest singular value (0 when cols > rank)
  double sigma_max = 0.0;
  int rank = 0;                    // numerical rank at tol_rank
  double tol_rank = 0.0;           // absolute cutoff used: tol * sigma_max
  Eigen::VectorXd singular_values; // descending, length min(rows, cols)
};

// Lower-triangular L with L L^T = A. A must be symmetric (checked to 1e-12
// relative) and positive definite; a non-positive pivot throws
// ConditioningError carrying the pivot index.
Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& A);

// Full spectral summary via SVD. sigma_min is min over all directions, i.e.
// 0 whenever the matrix has a nontrivial kernel (cols > rank).
SpectralSummary min_singular_value(const Eigen::MatrixXd& A, double tol_rank = 1e-10);

// Orthonormal basis N of ker(A): ||A N||_F <= tol_rank * ||A||_F * sqrt(cols(N)),
// N^T N = I to 1e-10. tol_rank is relative to sigma_max.
Eigen::MatrixXd nullspace_basis(const Eigen::MatrixXd& A, double tol_rank = 1e-10);

// Orthogonal projection of v onto span(basis); basis columns need not be
// orthonormal (orthonormalized internally when not).
Eigen::VectorXd project(const Eigen::VectorXd& v, const Eigen::MatrixXd& basis);

// || v - project(v, basis) ||_2
double dist_to_span(const Eigen::VectorXd& v, const Eigen::MatrixXd& basis);

// Orthonormalize the columns of B (rank-revealing; drops dependent columns).
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& B, double tol_rank = 1e-10);

// Smallest eigenvalue of the SPD matrix A = L L^T estimated by power
// iteration on A^{-1} through triangular solves with the given Cholesky
// factor. Deterministic (seeded start vector).
double smallest_eigenvalue_via_cholesky(const Eigen::MatrixXd& L, int iters = 500,
                                        std::uint64_t seed = 1);

}  // namespace erlasso::numerics
