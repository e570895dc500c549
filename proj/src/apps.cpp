#include "mlsos/apps.hpp"

#include <algorithm>
#include <cmath>

#include "mlsos/lp.hpp"

namespace mlsos::apps {

const char* to_string(ContainmentDecision d) {
    switch (d) {
        case ContainmentDecision::Contained: return "contained";
        case ContainmentDecision::NotContained: return "not_contained";
        case ContainmentDecision::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

BimatrixGame shift_positive(const Matrix& A, const Matrix& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols())
        throw DimensionMismatch("shift_positive: payoff matrices must share a shape");
    if (A.size() == 0) throw DimensionMismatch("shift_positive: empty matrices");
    const double mn = std::min(A.minCoeff(), B.minCoeff());
    BimatrixGame g;
    g.shift = (mn > 0.0) ? 0.0 : 1.0 - mn;
    g.A = A.array() + g.shift;
    g.B = B.array() + g.shift;
    return g;
}

mlp::MultilinearProgram game_to_mlp(const BimatrixGame& g) {
    if (g.A.minCoeff() <= 0.0 || g.B.minCoeff() <= 0.0)
        throw NonPositiveEntries("game_to_mlp: payoff matrices must be entrywise positive");
    const int m = static_cast<int>(g.A.rows());
    const int n = static_cast<int>(g.A.cols());

    // P1 = {x >= 0, B^T x <= 1}, P2 = {y >= 0, A y <= 1}.
    Matrix A1(m + n, m);
    Vector a1(m + n);
    A1.topRows(m) = -Matrix::Identity(m, m);
    a1.head(m).setZero();
    A1.bottomRows(n) = g.B.transpose();
    a1.tail(n).setOnes();

    Matrix A2(n + m, n);
    Vector a2(n + m);
    A2.topRows(n) = -Matrix::Identity(n, n);
    a2.head(n).setZero();
    A2.bottomRows(m) = g.A;
    a2.tail(m).setOnes();

    mlp::MultilinearProgram p;
    p.blocks.push_back(polytope::HPolytope::from_inequalities(std::move(A1), std::move(a1)));
    p.blocks.push_back(polytope::HPolytope::from_inequalities(std::move(A2), std::move(a2)));
    p.objective.l = 2;
    p.objective.block_dims = {m, n};
    const Matrix AB = g.A + g.B;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            if (AB(i, j) != 0.0) p.objective.set(0b11, {i, j}, AB(i, j));
    for (int i = 0; i < m; ++i) p.objective.set(0b01, {i}, -1.0);
    for (int j = 0; j < n; ++j) p.objective.set(0b10, {j}, -1.0);
    p.sense = mlp::Sense::Max;
    return p;
}

bool check_nondegenerate(const BimatrixGame& g) {
    // Vertex-level reading of nondegeneracy: work on the raw representations
    // (duplicate rows kept) and flag any vertex with more tight rows than its
    // ambient dimension.
    mlp::MultilinearProgram p = game_to_mlp(g);
    for (auto& blk : p.blocks) {
        blk = polytope::normalize(blk);
        polytope::VertexSet vs = polytope::vertices(blk);
        for (bool deg : vs.degenerate)
            if (deg) return false;
    }
    return true;
}

bool is_equilibrium(const Matrix& A, const Matrix& B, const Vector& x, const Vector& y, double tol) {
    const double sum_x = x.sum(), sum_y = y.sum();
    if (x.minCoeff() < -tol || y.minCoeff() < -tol) return false;
    if (std::abs(sum_x - 1.0) > 1e-8 || std::abs(sum_y - 1.0) > 1e-8) return false;
    const double v1 = x.dot(A * y);
    const Vector br1 = A * y;  // payoffs of pure strategies for player 1
    if (br1.maxCoeff() > v1 + tol) return false;
    const double v2 = x.dot(B * y);
    const Vector br2 = B.transpose() * x;
    if (br2.maxCoeff() > v2 + tol) return false;
    return true;
}

GameSolveResult solve_game(const BimatrixGame& g, const GameOptions& opts) {
    GameSolveResult out;
    out.nondegenerate = check_nondegenerate(g);
    if (!out.nondegenerate)
        out.degenerate_warning =
            "degenerate game: finite convergence of the relaxation order is not guaranteed";

    mlp::MultilinearProgram p = game_to_mlp(g);
    p.prepare();
    out.report = hierarchy::run(p, opts.hierarchy);

    const Matrix Ao = g.original_A();
    const Matrix Bo = g.original_B();

    std::vector<mlp::BlockPoint> candidates;
    if (out.report.witness) candidates.push_back(*out.report.witness);

    // Fall back to optimal vertex tuples from the oracle.
    bool saw_zero_sum_only = false;
    {
        mlp::OracleResult orc = mlp::vertex_oracle(p, 1e-9, opts.vertex_cap);
        for (const auto& tup : orc.optimal_tuples) {
            mlp::BlockPoint bp;
            for (int i = 0; i < p.l(); ++i) bp.push_back(p.vertex_data(i).vertices[tup[i]]);
            candidates.push_back(std::move(bp));
        }
    }

    for (const auto& bp : candidates) {
        const double sx = bp[0].sum();
        const double sy = bp[1].sum();
        if (sx < opts.min_block_sum || sy < opts.min_block_sum) {
            saw_zero_sum_only = true;
            continue;
        }
        Vector xh = bp[0] / sx;
        Vector yh = bp[1] / sy;
        if (!is_equilibrium(Ao, Bo, xh, yh, 1e-6)) continue;
        out.equilibrium.x_hat = std::move(xh);
        out.equilibrium.y_hat = std::move(yh);
        out.equilibrium.payoff1 = out.equilibrium.x_hat.dot(Ao * out.equilibrium.y_hat);
        out.equilibrium.payoff2 = out.equilibrium.x_hat.dot(Bo * out.equilibrium.y_hat);
        return out;
    }

    if (saw_zero_sum_only)
        throw NoNontrivialOptimizer(
            "solve_game: every located optimizer has a vanishing block sum and cannot be normalized");
    throw NoNontrivialOptimizer("solve_game: no optimizer passed the equilibrium verification");
}

mlp::MultilinearProgram containment_to_mlp(const ContainmentInstance& c) {
    const int d = static_cast<int>(c.P_A.cols());
    const int rows = static_cast<int>(c.Q_B.rows());
    const int naux = static_cast<int>(c.Q_Bprime.size() == 0 ? 0 : c.Q_Bprime.cols());
    if (c.Q_b.size() != rows) throw DimensionMismatch("containment: Q right-hand side length mismatch");
    if (naux > 0 && c.Q_Bprime.rows() != rows)
        throw DimensionMismatch("containment: B' row count mismatch");

    // Z = { z >= 0, 1^T z = 1, B'^T z = 0 }: the kernel condition makes Z a
    // polytope; when it fails the feasible set would be the unbounded
    // nonnegative orthant slice, which the hierarchy cannot treat.
    Matrix E(1 + naux, rows);
    E.row(0).setOnes();
    if (naux > 0) E.bottomRows(naux) = c.Q_Bprime.transpose();
    Vector e = Vector::Zero(1 + naux);
    e(0) = 1.0;
    {
        Matrix G = -Matrix::Identity(rows, rows);
        Vector gz = Vector::Zero(rows);
        lp::LpResult probe = lp::feasible_point(G, gz, E, e);
        if (probe.status != lp::LpStatus::Optimal)
            throw KernelConditionFailed(
                "containment: ker(B'^T) meets the nonnegative orthant only at 0; the simplex "
                "would have to be replaced by the unbounded orthant");
    }

    mlp::MultilinearProgram p;
    p.blocks.push_back(polytope::HPolytope::make(d, c.P_A, c.P_a, Matrix(0, d), Vector(0)));
    p.blocks.push_back(polytope::HPolytope::make(rows, -Matrix::Identity(rows, rows),
                                                 Vector::Zero(rows), std::move(E), std::move(e)));
    p.objective.l = 2;
    p.objective.block_dims = {d, rows};
    // Maximize -z^T (b - B x) = sum_{j,k} B_{k,j} x_j z_k - b^T z.
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < rows; ++k)
            if (c.Q_B(k, j) != 0.0) p.objective.set(0b11, {j, k}, c.Q_B(k, j));
    for (int k = 0; k < rows; ++k)
        if (c.Q_b(k) != 0.0) p.objective.set(0b10, {k}, -c.Q_b(k));
    p.sense = mlp::Sense::Max;
    return p;
}

ContainmentVerdict decide_containment(const ContainmentInstance& c, const ContainmentOptions& opts) {
    ContainmentVerdict v;
    mlp::MultilinearProgram p = containment_to_mlp(c);
    p.prepare();
    v.report = hierarchy::run(p, opts.hierarchy);

    // Internal values are for max of the negated objective.
    const double tol = opts.tol;
    v.certified_lower = -v.report.best_upper;
    const double witness_min = std::isfinite(v.report.best_lower)
                                   ? -v.report.best_lower
                                   : std::numeric_limits<double>::infinity();

    if (witness_min < -tol && v.report.witness) {
        v.decision = ContainmentDecision::NotContained;
        v.witness = std::make_pair((*v.report.witness)[0], (*v.report.witness)[1]);
        v.witness_value = witness_min;
    } else if (v.certified_lower >= -tol) {
        v.decision = ContainmentDecision::Contained;
    } else {
        v.decision = ContainmentDecision::Inconclusive;
    }
    v.tight = std::isfinite(v.certified_lower) && std::abs(v.certified_lower) <= tol;
    return v;
}

}  // namespace mlsos::apps
