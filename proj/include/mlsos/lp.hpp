#pragma once

#include <vector>

#include "mlsos/linalg.hpp"

namespace mlsos::lp {

using linalg::Matrix;
using linalg::Vector;

// minimize c^T x  subject to  G x <= g,  E x = e.  Variables are free.
struct LpProblem {
    Vector c;
    Matrix G;
    Vector g;
    Matrix E;
    Vector e;

    static LpProblem minimize(Vector c, Matrix G, Vector g, Matrix E = Matrix(0, 0),
                              Vector e = Vector(0));
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Vector point;              // valid when Optimal
    double value = 0.0;        // c^T point
    std::vector<int> active_set;  // inequality rows tight at the point
};

// Two-phase revised simplex with Bland's rule; deterministic.
LpResult solve_lp(const LpProblem& p);

// Phase-I probe: returns Optimal with some feasible point, or Infeasible.
LpResult feasible_point(const Matrix& G, const Vector& g, const Matrix& E, const Vector& e);

const char* to_string(LpStatus s);

}  // namespace mlsos::lp
