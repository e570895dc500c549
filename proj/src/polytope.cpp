#include "mlsos/polytope.hpp"

#include <algorithm>
#include <cmath>

#include "mlsos/lp.hpp"

namespace mlsos::polytope {

HPolytope HPolytope::from_inequalities(Matrix A, Vector a) {
    HPolytope p;
    p.dim = static_cast<int>(A.cols());
    p.A = std::move(A);
    p.a = std::move(a);
    p.B = Matrix(0, p.dim);
    p.b = Vector(0);
    return p;
}

HPolytope HPolytope::make(int dim, Matrix A, Vector a, Matrix B, Vector b) {
    HPolytope p;
    p.dim = dim;
    p.A = std::move(A);
    p.a = std::move(a);
    p.B = std::move(B);
    p.b = std::move(b);
    if (p.A.size() == 0) p.A = Matrix(0, dim);
    if (p.B.size() == 0) p.B = Matrix(0, dim);
    return p;
}

HPolytope HPolytope::box(const Vector& lo, const Vector& hi) {
    const int d = static_cast<int>(lo.size());
    Matrix A(2 * d, d);
    Vector a(2 * d);
    A.setZero();
    for (int i = 0; i < d; ++i) {
        A(2 * i, i) = 1.0;
        a(2 * i) = hi(i);
        A(2 * i + 1, i) = -1.0;
        a(2 * i + 1) = -lo(i);
    }
    return from_inequalities(std::move(A), std::move(a));
}

HPolytope normalize(const HPolytope& P) {
    HPolytope out = P;
    const int d = P.dim;
    const int n0 = P.num_eq();

    // Keep a maximal independent subset of equality rows; a dependent row
    // with an inconsistent right-hand side is an error.
    if (n0 > 0) {
        const double scale = std::max(1.0, std::max(linalg::max_abs(P.B), P.b.cwiseAbs().maxCoeff()));
        const double tol = 1e-10 * scale;
        std::vector<int> kept;
        Matrix R(n0, d + 1);  // reduced [B | b] rows of kept set
        int r = 0;
        for (int i = 0; i < n0; ++i) {
            Vector row(d + 1);
            row.head(d) = P.B.row(i).transpose();
            row(d) = P.b(i);
            // Eliminate against previously kept (reduced) rows.
            for (int k = 0; k < r; ++k) {
                int piv = -1;
                double pv = 0;
                for (int j = 0; j < d; ++j)
                    if (std::abs(R(k, j)) > std::abs(pv)) { pv = R(k, j); piv = j; }
                if (piv < 0) continue;
                row -= (row(piv) / pv) * R.row(k).transpose();
            }
            if (row.head(d).cwiseAbs().maxCoeff() > tol) {
                R.row(r++) = row.transpose();
                kept.push_back(i);
            } else if (std::abs(row(d)) > tol) {
                throw InconsistentEqualities("normalize: equality row " + std::to_string(i) +
                                             " contradicts earlier rows");
            }
        }
        Matrix Bk(static_cast<int>(kept.size()), d);
        Vector bk(static_cast<int>(kept.size()));
        for (size_t k = 0; k < kept.size(); ++k) {
            Bk.row(static_cast<int>(k)) = P.B.row(kept[k]);
            bk(static_cast<int>(k)) = P.b(kept[k]);
        }
        out.B = std::move(Bk);
        out.b = std::move(bk);
    }

    const int n = out.num_eq();
    if (d - n <= 0)
        throw DegenerateBlock("normalize: dim - n_eq = " + std::to_string(d - n) +
                              ", affine subspace has no free direction");

    // Relative interior via max-min-slack: max delta s.t. Ax + delta*1 <= a,
    // delta <= 1, Bx = b. Variables (x, delta), minimize -delta.
    const int m = out.num_ineq();
    {
        Matrix G(m + 1, d + 1);
        Vector g(m + 1);
        G.setZero();
        if (m > 0) {
            G.block(0, 0, m, d) = out.A;
            G.block(0, d, m, 1).setConstant(1.0);
            g.head(m) = out.a;
        }
        G(m, d) = 1.0;
        g(m) = 1.0;
        Matrix E(n, d + 1);
        E.setZero();
        if (n > 0) E.block(0, 0, n, d) = out.B;
        Vector c = Vector::Zero(d + 1);
        c(d) = -1.0;
        lp::LpResult r = lp::solve_lp(lp::LpProblem::minimize(c, G, g, E, out.b));
        if (r.status != lp::LpStatus::Optimal || -r.value <= 1e-9)
            throw EmptyRelativeInterior("normalize: max-min inequality slack " +
                                        std::to_string(r.status == lp::LpStatus::Optimal ? -r.value : -1.0) +
                                        " not positive");
        out.interior_point = r.point.head(d).eval();
    }

    out.normalized = true;
    return out;
}

bool is_bounded(const HPolytope& P) {
    const int d = P.dim;
    const int m = P.num_ineq();
    // Recession cone {Ax <= 0, Bx = 0} intersected with the unit box; the cone
    // is {0} iff every +-coordinate maximum over that set is 0.
    Matrix G(m + 2 * d, d);
    Vector g(m + 2 * d);
    G.setZero();
    if (m > 0) {
        G.block(0, 0, m, d) = P.A;
        g.head(m).setZero();
    }
    for (int i = 0; i < d; ++i) {
        G(m + 2 * i, i) = 1.0;
        g(m + 2 * i) = 1.0;
        G(m + 2 * i + 1, i) = -1.0;
        g(m + 2 * i + 1) = 1.0;
    }
    for (int i = 0; i < d; ++i) {
        for (double sign : {1.0, -1.0}) {
            Vector c = Vector::Zero(d);
            c(i) = -sign;
            lp::LpResult r = lp::solve_lp(lp::LpProblem::minimize(c, G, g, P.B, Vector::Zero(P.num_eq())));
            if (r.status != lp::LpStatus::Optimal) return false;
            if (-r.value > 1e-9) return false;
        }
    }
    return true;
}

HPolytope remove_redundant(const HPolytope& P) {
    HPolytope out = P;
    const int m = P.num_ineq();
    if (m == 0) return out;

    std::vector<bool> kept(m, true);
    for (int i = 0; i < m; ++i) {
        // Maximize row i over the others still kept.
        std::vector<int> rows;
        for (int k = 0; k < m; ++k)
            if (k != i && kept[k]) rows.push_back(k);
        Matrix G(static_cast<int>(rows.size()), P.dim);
        Vector g(static_cast<int>(rows.size()));
        for (size_t k = 0; k < rows.size(); ++k) {
            G.row(static_cast<int>(k)) = P.A.row(rows[k]);
            g(static_cast<int>(k)) = P.a(rows[k]);
        }
        Vector c = -P.A.row(i).transpose();
        lp::LpResult r = lp::solve_lp(lp::LpProblem::minimize(c, G, g, P.B, P.b));
        if (r.status == lp::LpStatus::Optimal && -r.value <= P.a(i) + 1e-9 * (1.0 + std::abs(P.a(i))))
            kept[i] = false;
    }

    std::vector<int> rows;
    for (int i = 0; i < m; ++i)
        if (kept[i]) rows.push_back(i);
    Matrix A(static_cast<int>(rows.size()), P.dim);
    Vector a(static_cast<int>(rows.size()));
    for (size_t k = 0; k < rows.size(); ++k) {
        A.row(static_cast<int>(k)) = P.A.row(rows[k]);
        a(static_cast<int>(k)) = P.a(rows[k]);
    }
    out.A = std::move(A);
    out.a = std::move(a);
    return out;
}

bool contains_point(const HPolytope& P, const Vector& x, double tol) {
    if (x.size() != P.dim) throw DimensionMismatch("contains_point: dimension mismatch");
    if (P.num_ineq() > 0) {
        Vector slack = P.a - P.A * x;
        if (slack.minCoeff() < -tol) return false;
    }
    if (P.num_eq() > 0) {
        Vector res = P.b - P.B * x;
        if (res.cwiseAbs().maxCoeff() > tol) return false;
    }
    return true;
}

namespace {
std::uint64_t n_choose_k(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        const std::uint64_t num = n - k + i;
        if (r > UINT64_MAX / num) return UINT64_MAX;
        r = r * num / i;
    }
    return r;
}
}  // namespace

VertexSet vertices(const HPolytope& P, std::uint64_t cap) {
    if (!P.normalized) throw DimensionMismatch("vertices: polytope must be normalized first");
    const int d = P.dim;
    const int n = P.num_eq();
    const int m = P.num_ineq();
    const int k = d - n;  // inequality rows needed to pin a vertex

    VertexSet vs;
    if (k > m) return vs;  // not enough rows to form any vertex
    if (n_choose_k(m, k) > cap)
        throw TooManyCombinations("vertices: C(" + std::to_string(m) + "," + std::to_string(k) +
                                  ") exceeds cap " + std::to_string(cap));

    const double atol = 1e-8 * (1.0 + (m > 0 ? P.a.cwiseAbs().maxCoeff() : 0.0));

    std::vector<Vector> found;
    std::vector<int> comb(k);
    for (int i = 0; i < k; ++i) comb[i] = i;

    auto advance = [&]() -> bool {
        int i = k - 1;
        while (i >= 0 && comb[i] == m - k + i) --i;
        if (i < 0) return false;
        ++comb[i];
        for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
        return true;
    };

    if (k == 0) {
        // Vertex fully determined by the equalities.
        Vector v = linalg::solve_linear(P.B, P.b);
        if (contains_point(P, v, 1e-8)) found.push_back(v);
    } else {
        bool more = m >= k;
        while (more) {
            Matrix S(d, d);
            Vector rhs(d);
            for (int i = 0; i < k; ++i) {
                S.row(i) = P.A.row(comb[i]);
                rhs(i) = P.a(comb[i]);
            }
            for (int i = 0; i < n; ++i) {
                S.row(k + i) = P.B.row(i);
                rhs(k + i) = P.b(i);
            }
            try {
                Vector v = linalg::solve_linear(S, rhs);
                if (contains_point(P, v, 1e-8)) found.push_back(v);
            } catch (const SingularMatrix&) {
                // rows do not pin a point; skip
            }
            more = advance();
        }
    }

    // Deterministic order, then dedup at relative tolerance 1e-9.
    std::sort(found.begin(), found.end(), [](const Vector& x, const Vector& y) {
        for (int i = 0; i < x.size(); ++i) {
            if (x(i) < y(i)) return true;
            if (x(i) > y(i)) return false;
        }
        return false;
    });
    for (const Vector& v : found) {
        bool dup = false;
        for (const Vector& w : vs.vertices) {
            const double s = 1.0 + std::max(v.cwiseAbs().maxCoeff(), w.cwiseAbs().maxCoeff());
            if ((v - w).cwiseAbs().maxCoeff() <= 1e-9 * s) {
                dup = true;
                break;
            }
        }
        if (!dup) vs.vertices.push_back(v);
    }

    for (const Vector& v : vs.vertices) {
        std::vector<int> act;
        for (int i = 0; i < m; ++i)
            if (std::abs(P.a(i) - P.A.row(i).dot(v)) <= atol) act.push_back(i);
        vs.degenerate.push_back(static_cast<int>(act.size()) > k);
        vs.active_sets.push_back(std::move(act));
    }
    return vs;
}

}  // namespace mlsos::polytope
