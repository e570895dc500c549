#include "mlsos/linalg.hpp"

#include <cmath>

namespace mlsos::linalg {

double max_abs(const Matrix& M) {
    if (M.size() == 0) return 0.0;
    return M.cwiseAbs().maxCoeff();
}

Vector solve_linear(const Matrix& M, const Vector& rhs) {
    if (M.rows() != M.cols()) throw DimensionMismatch("solve_linear: matrix not square");
    if (rhs.size() != M.rows()) throw DimensionMismatch("solve_linear: rhs length mismatch");
    if (M.rows() == 0) return Vector(0);

    Eigen::PartialPivLU<Matrix> lu(M);
    const double scale = max_abs(M);
    const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (min_pivot <= 1e-12 * scale) {
        throw SingularMatrix("solve_linear: pivot " + std::to_string(min_pivot) +
                             " below 1e-12 * " + std::to_string(scale));
    }
    return lu.solve(rhs);
}

SymEigen sym_eigen(const Matrix& M) {
    if (M.rows() != M.cols()) throw DimensionMismatch("sym_eigen: matrix not square");
    const double asym = max_abs(M - M.transpose());
    if (asym > 1e-9 * (1.0 + max_abs(M))) {
        throw DimensionMismatch("sym_eigen: input not symmetric, |M - M^T| = " + std::to_string(asym));
    }
    Matrix S = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(S);
    if (es.info() != Eigen::Success) throw NoConvergence("sym_eigen: iteration cap reached");
    return SymEigen{es.eigenvalues(), es.eigenvectors()};
}

int rank(const Matrix& M, double tol) {
    if (tol <= 0) throw DimensionMismatch("rank: tol must be positive");
    if (M.size() == 0 || max_abs(M) == 0.0) return 0;
    Eigen::ColPivHouseholderQR<Matrix> qr(M);
    qr.setThreshold(tol);
    return static_cast<int>(qr.rank());
}

Eigen::LLT<Matrix> chol_shifted(const Matrix& M, double* shift_used) {
    const Eigen::Index n = M.rows();
    double tr = M.trace();
    if (tr <= 0) tr = 1.0;
    double shift = 0.0;
    for (;;) {
        Matrix Ms = M;
        if (shift > 0) Ms.diagonal().array() += shift;
        Eigen::LLT<Matrix> llt(Ms);
        if (llt.info() == Eigen::Success) {
            if (shift_used) *shift_used = shift;
            return llt;
        }
        if (shift == 0.0) {
            shift = 1e-12 * tr;
        } else if (shift < 1e-6 * tr) {
            shift = std::min(shift * 10.0, 1e-6 * tr);
        } else {
            throw SingularMatrix("chol_shifted: factorization failed up to shift 1e-6 * trace");
        }
        (void)n;
    }
}

}  // namespace mlsos::linalg
