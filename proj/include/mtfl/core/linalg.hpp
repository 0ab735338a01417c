#pragma once

#include <span>
#include <vector>

#include "mtfl/core/matrix.hpp"

namespace mtfl::linalg {

/// C = A * B.
Matrix matmul(const Matrix &a, const Matrix &b);

/// C = A^T * B (A stored untransposed).
Matrix matmul_tn(const Matrix &a, const Matrix &b);

double frob_sq(const Matrix &m);

/// Sum over rows of the row L2 norm (the L2,1 norm).
double l21_norm(const Matrix &m);

double sum_abs(const Matrix &m);

/// Solves A x = b for symmetric positive definite A, in-place Cholesky.
/// Throws mtfl::SolverError if A is not positive definite.
std::vector<double> cholesky_solve(Matrix a, std::span<const double> b);

/// Multi-RHS variant: solves A X = B column-by-column with one shared
/// factorization. B is n x k; returns n x k.
Matrix cholesky_solve(Matrix a, const Matrix &b);

/// Largest eigenvalue of X^T X estimated by power iteration on
/// v -> X^T (X v). Deterministic seeded start; iterates until the
/// Rayleigh quotient moves by less than rel_tol or max_iter is hit.
double spectral_norm_xtx(const Matrix &x, int max_iter = 50, double rel_tol = 1e-6);

} // namespace mtfl::linalg
