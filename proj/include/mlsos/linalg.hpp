#pragma once

#include <Eigen/Dense>

#include "mlsos/errors.hpp"

namespace mlsos::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct SymEigen {
    Vector eigenvalues;   // ascending
    Matrix eigenvectors;  // columns, orthonormal
};

// Solves M x = rhs with partial pivoting. Throws SingularMatrix when a pivot
// falls below 1e-12 * max|M|.
Vector solve_linear(const Matrix& M, const Vector& rhs);

// Spectral decomposition of a (numerically) symmetric matrix. The input is
// symmetrized before decomposing; asymmetry beyond 1e-9 is rejected.
SymEigen sym_eigen(const Matrix& M);

// Numerical rank via column-pivoted QR; pivots below tol * max pivot count as zero.
int rank(const Matrix& M, double tol);

// Cholesky factor of a nearly-PSD matrix. When the plain factorization fails,
// a diagonal shift of 1e-12 * trace is added and escalated by 10x up to
// 1e-6 * trace. Throws SingularMatrix when even the largest shift fails.
// `shift_used` (optional) receives the shift that succeeded.
Eigen::LLT<Matrix> chol_shifted(const Matrix& M, double* shift_used = nullptr);

double max_abs(const Matrix& M);

}  // namespace mlsos::linalg
