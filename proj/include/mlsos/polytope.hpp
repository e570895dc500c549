#pragma once

#include <optional>
#include <vector>

#include "mlsos/linalg.hpp"

namespace mlsos::polytope {

using linalg::Matrix;
using linalg::Vector;

// H-polytope block P = { x | a >= A x, b = B x }.
struct HPolytope {
    int dim = 0;
    Matrix A;  // m x dim
    Vector a;  // m
    Matrix B;  // n x dim
    Vector b;  // n
    bool normalized = false;
    std::optional<Vector> interior_point;  // relative-interior point found during normalize

    int num_ineq() const { return static_cast<int>(A.rows()); }
    int num_eq() const { return static_cast<int>(B.rows()); }

    static HPolytope from_inequalities(Matrix A, Vector a);
    static HPolytope make(int dim, Matrix A, Vector a, Matrix B, Vector b);
    // Axis-aligned box {lo <= x <= hi} as 2*dim inequality rows.
    static HPolytope box(const Vector& lo, const Vector& hi);
};

struct VertexSet {
    std::vector<Vector> vertices;
    std::vector<std::vector<int>> active_sets;  // tight inequality rows per vertex
    std::vector<bool> degenerate;               // more than dim - n_eq tight rows

    size_t size() const { return vertices.size(); }
};

// Enforces Assumption 1: drops dependent (consistent) equality rows so that
// rank(B) = n, requires dim - n > 0, and certifies a nonempty relative
// interior by the max-min-slack LP (optimum must exceed 1e-9). The interior
// point is stashed on the result.
HPolytope normalize(const HPolytope& P);

// True iff the recession cone {Ax <= 0, Bx = 0} is {0}.
bool is_bounded(const HPolytope& P);

// Drops every inequality whose removal does not change the feasible set.
HPolytope remove_redundant(const HPolytope& P);

// All vertices by enumerating (dim - n_eq)-subsets of inequality rows.
// Throws TooManyCombinations when C(m, dim-n_eq) exceeds `cap`.
VertexSet vertices(const HPolytope& P, std::uint64_t cap = 1000000);

bool contains_point(const HPolytope& P, const Vector& x, double tol);

}  // namespace mlsos::polytope
