#pragma once

#include <optional>
#include <string>
#include <utility>

#include "mlsos/hierarchy.hpp"
#include "mlsos/mlp.hpp"

namespace mlsos::apps {

using linalg::Matrix;
using linalg::Vector;

// Payoff matrices after the positivity shift; `shift` recovers the originals.
struct BimatrixGame {
    Matrix A;
    Matrix B;
    double shift = 0.0;

    Matrix original_A() const { return A.array() - shift; }
    Matrix original_B() const { return B.array() - shift; }
};

struct Equilibrium {
    Vector x_hat;     // mixed strategy of player 1
    Vector y_hat;     // mixed strategy of player 2
    double payoff1 = 0.0;  // w.r.t. the original (unshifted) matrices
    double payoff2 = 0.0;
};

struct GameSolveResult {
    Equilibrium equilibrium;
    hierarchy::HierarchyReport report;
    bool nondegenerate = true;
    std::optional<std::string> degenerate_warning;
};

BimatrixGame shift_positive(const Matrix& A, const Matrix& B);
mlp::MultilinearProgram game_to_mlp(const BimatrixGame& g);
bool check_nondegenerate(const BimatrixGame& g);

struct GameOptions {
    hierarchy::RunOptions hierarchy;
    double min_block_sum = 1e-6;
    std::uint64_t vertex_cap = 1000000;
};

GameSolveResult solve_game(const BimatrixGame& g, const GameOptions& opts = {});

// Best-response check against the given (original) matrices.
bool is_equilibrium(const Matrix& A, const Matrix& B, const Vector& x, const Vector& y, double tol);

// pi(P) subset-of pi(Q) with P = {x in R^d : a >= A x} (no auxiliary
// variables on the P side) and Q = {(x, y') : b >= B x + B' y'}.
struct ContainmentInstance {
    Matrix P_A;
    Vector P_a;
    Matrix Q_B;       // rows x d
    Vector Q_b;
    Matrix Q_Bprime;  // rows x n_aux (n_aux = 0 for plain H-in-H)
};

enum class ContainmentDecision { Contained, NotContained, Inconclusive };

struct ContainmentVerdict {
    ContainmentDecision decision = ContainmentDecision::Inconclusive;
    double certified_lower = 0.0;  // certified lower bound on min z^T (b - B x)
    std::optional<std::pair<Vector, Vector>> witness;  // (x, z) with negative value
    double witness_value = 0.0;
    bool tight = false;
    hierarchy::HierarchyReport report;
};

mlp::MultilinearProgram containment_to_mlp(const ContainmentInstance& c);

struct ContainmentOptions {
    hierarchy::RunOptions hierarchy;
    double tol = 1e-6;
};

ContainmentVerdict decide_containment(const ContainmentInstance& c, const ContainmentOptions& opts = {});

const char* to_string(ContainmentDecision d);

}  // namespace mlsos::apps
