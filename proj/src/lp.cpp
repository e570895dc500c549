#include "mlsos/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mlsos::lp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCostTol = 1e-9;
constexpr double kPivotTol = 1e-10;
constexpr double kFeasTol = 1e-8;

// Internal standard form: rows [G I; E 0] * v = [g; e] with
// v = (x free, s >= 0, artificials >= 0). All nonbasic variables sit at 0,
// so basic values are always B^{-1} * beta.
struct Tableau {
    int nx = 0;     // original variables (free)
    int ns = 0;     // slacks (one per inequality)
    int m = 0;      // rows
    Matrix A;       // m x (nx + ns + m), artificial columns appended
    Vector beta;
    std::vector<double> lo, up;
    std::vector<int> basis;       // row -> variable
    std::vector<char> is_basic;   // variable -> flag

    int nvars() const { return nx + ns + m; }
    bool is_free(int j) const { return lo[j] == -kInf; }
};

struct PhaseOutcome {
    bool unbounded = false;
    Vector basic_values;
};

// One simplex phase: minimize cost over the current basis. Bland's rule
// (lowest eligible index entering, lowest variable index leaving among
// minimal ratios) for anti-cycling and determinism.
PhaseOutcome run_phase(Tableau& t, const Vector& cost, int max_iter) {
    const int m = t.m;
    PhaseOutcome out;

    for (int iter = 0; iter < max_iter; ++iter) {
        Matrix B(m, m);
        for (int i = 0; i < m; ++i) B.col(i) = t.A.col(t.basis[i]);
        Eigen::PartialPivLU<Matrix> lu(B);
        const double scale = std::max(1.0, linalg::max_abs(B));
        if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() <= 1e-13 * scale)
            throw NumericalFailure("simplex: basis matrix singular");

        Vector xb = lu.solve(t.beta);

        Vector cb(m);
        for (int i = 0; i < m; ++i) cb(i) = cost(t.basis[i]);
        Vector y = lu.adjoint().solve(cb);

        // Entering variable, Bland: lowest index with improving reduced cost.
        int enter = -1, dir = 0;
        for (int j = 0; j < t.nvars(); ++j) {
            if (t.is_basic[j]) continue;
            if (t.lo[j] == 0.0 && t.up[j] == 0.0) continue;  // locked artificial
            const double d = cost(j) - t.A.col(j).dot(y);
            if (d < -kCostTol && (t.lo[j] == 0.0 || t.is_free(j))) {
                enter = j;
                dir = +1;
                break;
            }
            if (d > kCostTol && t.is_free(j)) {
                enter = j;
                dir = -1;
                break;
            }
        }
        if (enter < 0) {
            out.basic_values = xb;
            return out;
        }

        Vector w = lu.solve(t.A.col(enter));

        // Ratio test: basic variable i moves at rate -dir*w(i) per unit step.
        double theta = kInf;
        for (int i = 0; i < m; ++i) {
            const double rate = -dir * w(i);
            const int bj = t.basis[i];
            double cap = kInf;
            if (rate < -kPivotTol && t.lo[bj] != -kInf)
                cap = std::max(0.0, (xb(i) - t.lo[bj]) / (-rate));
            else if (rate > kPivotTol && t.up[bj] != kInf)
                cap = std::max(0.0, (t.up[bj] - xb(i)) / rate);
            if (cap < theta) theta = cap;
        }
        if (theta == kInf) {
            out.unbounded = true;
            return out;
        }

        int leave_row = -1, leave_var = std::numeric_limits<int>::max();
        for (int i = 0; i < m; ++i) {
            const double rate = -dir * w(i);
            const int bj = t.basis[i];
            double cap = kInf;
            if (rate < -kPivotTol && t.lo[bj] != -kInf)
                cap = std::max(0.0, (xb(i) - t.lo[bj]) / (-rate));
            else if (rate > kPivotTol && t.up[bj] != kInf)
                cap = std::max(0.0, (t.up[bj] - xb(i)) / rate);
            if (cap <= theta + 1e-12 && bj < leave_var) {
                leave_var = bj;
                leave_row = i;
            }
        }
        if (leave_row < 0) throw NumericalFailure("simplex: ratio test failed");

        t.is_basic[t.basis[leave_row]] = 0;
        t.basis[leave_row] = enter;
        t.is_basic[enter] = 1;
    }
    throw NumericalFailure("simplex: iteration cap reached");
}

}  // namespace

LpProblem LpProblem::minimize(Vector c, Matrix G, Vector g, Matrix E, Vector e) {
    LpProblem p;
    p.c = std::move(c);
    p.G = std::move(G);
    p.g = std::move(g);
    p.E = std::move(E);
    p.e = std::move(e);
    return p;
}

const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
    }
    return "unknown";
}

LpResult solve_lp(const LpProblem& p) {
    const int nx = static_cast<int>(p.c.size());
    const int ms = static_cast<int>(p.G.rows());
    const int me = static_cast<int>(p.E.rows());
    const int m = ms + me;

    if (ms > 0 && p.G.cols() != nx) throw DimensionMismatch("solve_lp: G column mismatch");
    if (me > 0 && p.E.cols() != nx) throw DimensionMismatch("solve_lp: E column mismatch");
    if (p.g.size() != ms || p.e.size() != me) throw DimensionMismatch("solve_lp: rhs length mismatch");

    LpResult res;

    if (m == 0) {
        // Unconstrained: bounded only when the objective vanishes.
        if (nx == 0 || p.c.cwiseAbs().maxCoeff() == 0.0) {
            res.status = LpStatus::Optimal;
            res.point = Vector::Zero(nx);
            res.value = 0.0;
        } else {
            res.status = LpStatus::Unbounded;
        }
        return res;
    }

    Tableau t;
    t.nx = nx;
    t.ns = ms;
    t.m = m;
    t.A = Matrix::Zero(m, nx + ms + m);
    t.beta = Vector(m);
    if (ms > 0) {
        t.A.block(0, 0, ms, nx) = p.G;
        t.A.block(0, nx, ms, ms) = Matrix::Identity(ms, ms);
        t.beta.head(ms) = p.g;
    }
    if (me > 0) {
        t.A.block(ms, 0, me, nx) = p.E;
        t.beta.tail(me) = p.e;
    }
    t.lo.assign(t.nvars(), 0.0);
    t.up.assign(t.nvars(), kInf);
    for (int j = 0; j < nx; ++j) t.lo[j] = -kInf;

    // Phase 1 basis: one artificial per row, signed to start feasible.
    t.basis.resize(m);
    t.is_basic.assign(t.nvars(), 0);
    for (int i = 0; i < m; ++i) {
        const int aj = nx + ms + i;
        t.A(i, aj) = (t.beta(i) >= 0.0) ? 1.0 : -1.0;
        t.basis[i] = aj;
        t.is_basic[aj] = 1;
    }

    const int max_iter = 10000 + 200 * (m + t.nvars());
    Vector cost1 = Vector::Zero(t.nvars());
    for (int i = 0; i < m; ++i) cost1(nx + ms + i) = 1.0;

    PhaseOutcome ph1 = run_phase(t, cost1, max_iter);
    if (ph1.unbounded) throw NumericalFailure("simplex: phase-1 unbounded");

    double art_sum = 0.0;
    for (int i = 0; i < m; ++i)
        if (t.basis[i] >= nx + ms) art_sum += std::abs(ph1.basic_values(i));
    const double bscale = 1.0 + (m > 0 ? t.beta.cwiseAbs().maxCoeff() : 0.0);
    if (art_sum > kFeasTol * bscale) {
        res.status = LpStatus::Infeasible;
        return res;
    }

    // Lock artificials at zero; any still basic stay pinned there.
    for (int i = 0; i < m; ++i) t.up[nx + ms + i] = 0.0;

    Vector cost2 = Vector::Zero(t.nvars());
    cost2.head(nx) = p.c;
    PhaseOutcome ph2 = run_phase(t, cost2, max_iter);
    if (ph2.unbounded) {
        res.status = LpStatus::Unbounded;
        return res;
    }

    Vector v = Vector::Zero(t.nvars());
    for (int i = 0; i < m; ++i) v(t.basis[i]) = ph2.basic_values(i);
    res.status = LpStatus::Optimal;
    res.point = v.head(nx);
    res.value = p.c.dot(res.point);

    if (ms > 0) {
        const double gscale = 1.0 + p.g.cwiseAbs().maxCoeff();
        Vector slack = p.g - p.G * res.point;
        for (int i = 0; i < ms; ++i)
            if (slack(i) <= kFeasTol * gscale) res.active_set.push_back(i);
    }
    return res;
}

LpResult feasible_point(const Matrix& G, const Vector& g, const Matrix& E, const Vector& e) {
    int nx = 0;
    if (G.rows() > 0) nx = static_cast<int>(G.cols());
    if (E.rows() > 0) nx = std::max(nx, static_cast<int>(E.cols()));
    LpProblem p = LpProblem::minimize(Vector::Zero(nx), G, g, E, e);
    return solve_lp(p);
}

}  // namespace mlsos::lp
