#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "mlsos/linalg.hpp"

namespace mlsos::sdp {

using linalg::Matrix;
using linalg::Vector;

// One nonzero of a symmetric per-block coefficient matrix (row <= col; the
// mirrored entry is implied).
struct MatEntry {
    int block;
    int row;
    int col;
    double value;
};

// minimize  sum_b <C_b, X_b> + q^T u
// s.t.      sum_b <A_{k,b}, X_b> + f_k^T u = c_k   (k = 1..m)
//           X_b >= 0 (PSD), u free.
struct SdpProblem {
    std::vector<int> psd_block_sizes;
    int free_count = 0;

    std::vector<std::vector<MatEntry>> con_mats;                  // per constraint
    std::vector<std::vector<std::pair<int, double>>> con_free;    // per constraint: (index, coeff)
    Vector rhs;                                                   // c_k
    std::vector<MatEntry> obj_mats;                               // C_b
    std::vector<std::pair<int, double>> obj_free;                 // q

    // Optional range restriction: block b is constrained to X_b = U X~ U^T
    // with X~ psd, U = block_ranges[b] orthonormal columns. An empty matrix
    // means no restriction. Entries above stay in full coordinates; returned
    // psd blocks are the embedded full-size matrices.
    std::vector<Matrix> block_ranges;

    int num_constraints() const { return static_cast<int>(rhs.size()); }
    int num_blocks() const { return static_cast<int>(psd_block_sizes.size()); }
    void validate() const;
};

enum class SdpStatus { Optimal, PrimalInfeasible, DualInfeasible, Stalled };

struct IterateInfo {
    double primal_obj;
    double dual_obj;
    double rel_primal_res;
    double rel_dual_res;
};

struct SdpSolution {
    SdpStatus status = SdpStatus::Stalled;
    std::vector<Matrix> psd_values;   // X blocks
    std::vector<Matrix> dual_slacks;  // S blocks
    Vector free_values;               // u
    Vector dual_values;               // y, one per constraint
    double primal_obj = 0.0;
    double dual_obj = 0.0;
    int iterations = 0;
    double rel_gap = 0.0;
    double rel_primal_res = 0.0;
    double rel_dual_res = 0.0;
    std::vector<IterateInfo> trace;   // one entry per iteration
};

struct SdpOptions {
    int max_iter = 200;
    double tol = 1e-8;
    double step_fraction = 0.98;
    int stall_window = 25;  // iterations without a 15% score improvement
    bool verbose = false;
};

SdpSolution solve_sdp(const SdpProblem& p, const SdpOptions& opts = {});

// (flag, lambda_min): flag = (lambda_min >= -tol).
std::pair<bool, double> check_psd(const Matrix& M, double tol);

// Debug dump, one line per nonzero; see README for the format.
void dump_sdp(const SdpProblem& p, std::ostream& os);

const char* to_string(SdpStatus s);

}  // namespace mlsos::sdp
