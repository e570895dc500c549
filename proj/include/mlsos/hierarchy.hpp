#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mlsos/mlp.hpp"
#include "mlsos/poly.hpp"
#include "mlsos/sdp.hpp"

namespace mlsos::hierarchy {

using linalg::Matrix;
using linalg::Vector;
using poly::Monomial;
using poly::Poly;

// Degree budget for the unconstrained SOS term sigma_0: the truncation can be
// read with sigma_0 of degree 2t (Gram over basis(n, t), default) or the
// literal 2t-2 (Gram over basis(n, t-1)).
enum class Sigma0Mode { Deg2t, Deg2tMinus2 };

struct CompiledOrder {
    int t = 0;
    int n = 0;
    Sigma0Mode mode = Sigma0Mode::Deg2t;
    sdp::SdpProblem sdp;
    std::vector<Monomial> rows;           // constraint monomials, kept order
    std::vector<Monomial> basis_sigma0;
    std::vector<Monomial> basis_ineq;     // shared by every inequality multiplier
    std::vector<Monomial> basis_tau;
    std::vector<std::pair<int, int>> ineq_labels;  // (block, row) per PSD block 1..
    std::vector<std::pair<int, int>> eq_labels;    // (block, row) per tau group
};

struct TruncatedCertificate {
    int t = 0;
    double mu = 0.0;
    Matrix gram0;
    std::vector<Matrix> gram_ineq;  // one per inequality, order of ineq_labels
    std::vector<Poly> tau;          // one per equality, order of eq_labels
};

struct CertificateReport {
    double max_residual = 0.0;     // largest coefficient of the recomputed residual
    double min_gram_eigenvalue = 0.0;
    bool passed = false;
};

struct OrderResult {
    int t = 0;
    double f_t = std::numeric_limits<double>::infinity();
    sdp::SdpStatus sdp_status = sdp::SdpStatus::Stalled;
    bool relaxation_infeasible = false;
    bool usable = false;  // value accepted as an upper bound (certificate verified)
    std::optional<TruncatedCertificate> certificate;
    CertificateReport cert_report;
    std::map<Monomial, double, poly::GradedLexLess> moments;
    std::optional<mlp::BlockPoint> candidate;
    double wall_seconds = 0.0;
};

enum class RunStatus { ConvergedCertified, OrderCapReached, SolverTrouble };

struct HierarchyReport {
    std::vector<OrderResult> orders;
    double best_upper = std::numeric_limits<double>::infinity();   // min verified f_t (internal Max sense)
    double best_lower = -std::numeric_limits<double>::infinity();  // best feasible value found
    std::optional<mlp::BlockPoint> witness;                        // attains best_lower
    double gap = std::numeric_limits<double>::infinity();
    RunStatus status = RunStatus::OrderCapReached;
    std::vector<std::string> notes;
};

struct RunOptions {
    int t_min = 0;            // 0: start at l
    int t_max = 0;            // 0: default l + 3
    double tol = 1e-5;
    Sigma0Mode sigma0 = Sigma0Mode::Deg2t;
    double sdp_tol = 1e-9;
    int sdp_max_iter = 200;
    std::uint64_t max_constraints = 6500;  // skip orders compiling beyond this many rows
    bool verbose = false;
};

// Assembles the order-t SOS membership program as a block SDP.
CompiledOrder compile(const mlp::MultilinearProgram& p, int t, Sigma0Mode mode = Sigma0Mode::Deg2t);

OrderResult solve_order(mlp::MultilinearProgram& p, int t, const RunOptions& opts = {});

// Recomputes the certificate residual with polynomial arithmetic, independent
// of the SDP solve path.
CertificateReport verify_certificate(const mlp::MultilinearProgram& p, const TruncatedCertificate& cert);

HierarchyReport run(mlp::MultilinearProgram& p, const RunOptions& opts = {});

const char* to_string(RunStatus s);

}  // namespace mlsos::hierarchy
