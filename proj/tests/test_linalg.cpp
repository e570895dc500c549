#include <doctest.h>

#include "mlsos/linalg.hpp"
#include "mlsos/randgen.hpp"

using namespace mlsos;
using linalg::Matrix;
using linalg::Vector;

TEST_SUITE_BEGIN("linalg");

TEST_CASE("solve_linear on identity and diagonal") {
    Matrix I = Matrix::Identity(3, 3);
    Vector rhs(3);
    rhs << 1, 2, 3;
    Vector x = linalg::solve_linear(I, rhs);
    CHECK((x - rhs).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-12));

    Matrix D(2, 2);
    D << 2, 0, 0, 4;
    Vector r2(2);
    r2 << 2, 4;
    Vector x2 = linalg::solve_linear(D, r2);
    CHECK(x2(0) == doctest::Approx(1.0));
    CHECK(x2(1) == doctest::Approx(1.0));
}

TEST_CASE("solve_linear rejects rank-deficient matrices") {
    Matrix M(2, 2);
    M << 1, 1, 1, 1;
    Vector rhs(2);
    rhs << 1, 2;
    CHECK_THROWS_AS(linalg::solve_linear(M, rhs), SingularMatrix);
}

TEST_CASE("solve_linear residual on random well-conditioned systems") {
    randgen::Rng rng(7);
    for (int rep = 0; rep < 30; ++rep) {
        const int n = rng.uniform_int(2, 20);
        Matrix M(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) M(i, j) = rng.uniform(-1, 1);
        M += 2.0 * n * Matrix::Identity(n, n);  // diagonally dominant
        Vector rhs(n);
        for (int i = 0; i < n; ++i) rhs(i) = rng.uniform(-5, 5);
        Vector x = linalg::solve_linear(M, rhs);
        const double res = (M * x - rhs).cwiseAbs().maxCoeff();
        CHECK(res <= 1e-9 * (1.0 + rhs.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("sym_eigen on small fixed matrices") {
    Matrix D(2, 2);
    D << 1, 0, 0, 2;
    auto se = linalg::sym_eigen(D);
    CHECK(se.eigenvalues(0) == doctest::Approx(1.0));
    CHECK(se.eigenvalues(1) == doctest::Approx(2.0));

    Matrix R(2, 2);
    R << 0, 1, 1, 0;
    se = linalg::sym_eigen(R);
    CHECK(se.eigenvalues(0) == doctest::Approx(-1.0));
    CHECK(se.eigenvalues(1) == doctest::Approx(1.0));

    Vector v(2);
    v << 1, 1;
    Matrix vv = v * v.transpose();
    se = linalg::sym_eigen(vv);
    CHECK(se.eigenvalues(0) == doctest::Approx(0.0));
    CHECK(se.eigenvalues(1) == doctest::Approx(2.0));
}

TEST_CASE("sym_eigen reconstruction and orthonormality on random symmetric matrices") {
    randgen::Rng rng(11);
    for (int rep = 0; rep < 100; ++rep) {
        const int n = rng.uniform_int(1, 40);
        Matrix M(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) M(i, j) = M(j, i) = rng.uniform(-3, 3);
        auto se = linalg::sym_eigen(M);
        const Matrix rec = se.eigenvectors * se.eigenvalues.asDiagonal() * se.eigenvectors.transpose();
        CHECK(linalg::max_abs(rec - M) <= 1e-9 * (1.0 + linalg::max_abs(M)));
        const Matrix orth = se.eigenvectors.transpose() * se.eigenvectors - Matrix::Identity(n, n);
        CHECK(linalg::max_abs(orth) <= 1e-10);
        for (int i = 0; i + 1 < n; ++i) CHECK(se.eigenvalues(i) <= se.eigenvalues(i + 1) + 1e-12);
    }
}

TEST_CASE("rank of simple matrices") {
    CHECK(linalg::rank(Matrix::Zero(2, 3), 1e-9) == 0);
    Matrix M(2, 2);
    M << 1, 0, 1, 0;
    CHECK(linalg::rank(M, 1e-9) == 1);
    CHECK(linalg::rank(Matrix::Identity(3, 3), 1e-9) == 3);
}

TEST_CASE("chol_shifted handles nearly-PSD input") {
    Matrix M(2, 2);
    M << 1, 1, 1, 1;  // PSD, singular
    double shift = -1;
    auto llt = linalg::chol_shifted(M, &shift);
    CHECK(llt.info() == Eigen::Success);
    Matrix N(2, 2);
    N << 1, 0, 0, -1e-13;  // tiny negative eigenvalue
    CHECK_NOTHROW(linalg::chol_shifted(N));
}

TEST_SUITE_END();
