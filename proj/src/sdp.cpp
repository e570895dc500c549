#include "mlsos/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

namespace mlsos::sdp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void SdpProblem::validate() const {
    const int m = num_constraints();
    if (static_cast<int>(con_mats.size()) != m || static_cast<int>(con_free.size()) != m)
        throw DimensionMismatch("SdpProblem: constraint array lengths disagree with rhs");
    auto check_entries = [&](const std::vector<MatEntry>& es) {
        for (const MatEntry& e : es) {
            if (e.block < 0 || e.block >= num_blocks())
                throw DimensionMismatch("SdpProblem: bad block index");
            const int s = psd_block_sizes[e.block];
            if (e.row < 0 || e.col < e.row || e.col >= s)
                throw DimensionMismatch("SdpProblem: entry out of range or not upper-triangular");
        }
    };
    for (const auto& es : con_mats) check_entries(es);
    check_entries(obj_mats);
    for (const auto& fs : con_free)
        for (const auto& [idx, v] : fs)
            if (idx < 0 || idx >= free_count) throw DimensionMismatch("SdpProblem: bad free index");
    for (const auto& [idx, v] : obj_free)
        if (idx < 0 || idx >= free_count) throw DimensionMismatch("SdpProblem: bad free index");
}

std::pair<bool, double> check_psd(const Matrix& M, double tol) {
    if (M.rows() == 0) return {true, 0.0};
    linalg::SymEigen se = linalg::sym_eigen(M);
    const double lmin = se.eigenvalues(0);
    return {lmin >= -tol, lmin};
}

const char* to_string(SdpStatus s) {
    switch (s) {
        case SdpStatus::Optimal: return "optimal";
        case SdpStatus::PrimalInfeasible: return "primal_infeasible";
        case SdpStatus::DualInfeasible: return "dual_infeasible";
        case SdpStatus::Stalled: return "stalled";
    }
    return "unknown";
}

void dump_sdp(const SdpProblem& p, std::ostream& os) {
    os << "sdp blocks";
    for (int s : p.psd_block_sizes) os << " " << s;
    os << " free " << p.free_count << " cons " << p.num_constraints() << "\n";
    for (const MatEntry& e : p.obj_mats)
        os << "obj " << e.block << " " << e.row << " " << e.col << " " << e.value << "\n";
    for (const auto& [idx, v] : p.obj_free) os << "objfree " << idx << " " << v << "\n";
    for (int k = 0; k < p.num_constraints(); ++k) {
        for (const MatEntry& e : p.con_mats[k])
            os << "con " << k << " " << e.block << " " << e.row << " " << e.col << " " << e.value << "\n";
        for (const auto& [idx, v] : p.con_free[k]) os << "free " << k << " " << idx << " " << v << "\n";
        os << "rhs " << k << " " << p.rhs(k) << "\n";
    }
}

namespace {

// Full (mirrored) entry list per constraint and block, for trace computations.
struct FullEntry {
    int row, col;
    double value;
};

struct BlockData {
    // For each constraint index k (global), the entries living in this block.
    std::vector<int> cons;                        // global constraint ids touching the block
    std::vector<std::vector<FullEntry>> entries;  // parallel to cons
};

double dot_full(const std::vector<FullEntry>& es, const Matrix& W) {
    double r = 0.0;
    for (const FullEntry& e : es) r += e.value * W(e.row, e.col);
    return r;
}

void add_full(Matrix& W, const std::vector<FullEntry>& es, double scale) {
    for (const FullEntry& e : es) W(e.row, e.col) += scale * e.value;
}

// Greedy column selection (modified Gram-Schmidt) keeping the earliest
// independent columns; returns kept indices. Earlier columns win ties, so the
// hierarchy's mu column (index 0) is always kept.
std::vector<int> independent_columns(const Matrix& F, double tol) {
    const int p = static_cast<int>(F.cols());
    std::vector<int> kept;
    std::vector<Vector> basis;
    for (int j = 0; j < p; ++j) {
        Vector v = F.col(j);
        const double orig = v.norm();
        if (orig == 0.0) continue;
        for (const Vector& b : basis) v -= b.dot(v) * b;
        for (const Vector& b : basis) v -= b.dot(v) * b;  // re-orthogonalize
        if (v.norm() > tol * orig) {
            basis.push_back(v / v.norm());
            kept.push_back(j);
        }
    }
    return kept;
}

double step_to_boundary(const Matrix& X, const Matrix& D) {
    // sup { a : X + a D psd }. X must be PD.
    Eigen::LLT<Matrix> llt(X);
    if (llt.info() != Eigen::Success) {
        // fall back to a shifted factor
        llt = linalg::chol_shifted(X);
    }
    Matrix L = llt.matrixL();
    Matrix W = L.triangularView<Eigen::Lower>().solve(D);
    W = L.triangularView<Eigen::Lower>().solve(W.transpose().eval());
    W = 0.5 * (W + W.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Matrix> es(W, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0);
    if (lmin >= 0) return kInf;
    return -1.0 / lmin;
}

struct Reduced {
    // Problem with dependent free columns dropped.
    std::vector<int> kept;   // kept free indices (into the original u)
    Matrix F;                // m x r dense free-coefficient matrix
    Vector q;                // reduced objective on u
};

}  // namespace

SdpSolution solve_sdp(const SdpProblem& prob, const SdpOptions& opts) {
    prob.validate();
    const int m = prob.num_constraints();
    const int nb = prob.num_blocks();
    if (m == 0) throw DimensionMismatch("solve_sdp: no constraints");

    // --- static data ------------------------------------------------------
    std::vector<BlockData> bd(nb);
    {
        std::vector<std::vector<FullEntry>> per_block(nb);
        for (int k = 0; k < m; ++k) {
            for (auto& v : per_block) v.clear();
            for (const MatEntry& e : prob.con_mats[k]) {
                per_block[e.block].push_back({e.row, e.col, e.value});
                if (e.row != e.col) per_block[e.block].push_back({e.col, e.row, e.value});
            }
            for (int b = 0; b < nb; ++b) {
                if (per_block[b].empty()) continue;
                bd[b].cons.push_back(k);
                bd[b].entries.push_back(per_block[b]);
            }
        }
    }

    std::vector<Matrix> Cfull(nb);
    for (int b = 0; b < nb; ++b) Cfull[b] = Matrix::Zero(prob.psd_block_sizes[b], prob.psd_block_sizes[b]);
    for (const MatEntry& e : prob.obj_mats) {
        Cfull[e.block](e.row, e.col) += e.value;
        if (e.row != e.col) Cfull[e.block](e.col, e.row) += e.value;
    }

    // Range restrictions: block b lives as X_b = U_b X~_b U_b^T.
    std::vector<bool> restricted(nb, false);
    std::vector<Matrix> U(nb);
    std::vector<int> rdim(nb);
    for (int b = 0; b < nb; ++b) {
        rdim[b] = prob.psd_block_sizes[b];
        if (b < static_cast<int>(prob.block_ranges.size()) && prob.block_ranges[b].size() > 0) {
            U[b] = prob.block_ranges[b];
            if (U[b].rows() != prob.psd_block_sizes[b] || U[b].cols() < 1 ||
                U[b].cols() > U[b].rows())
                throw DimensionMismatch("solve_sdp: bad block range matrix");
            restricted[b] = true;
            rdim[b] = static_cast<int>(U[b].cols());
        }
    }
    auto embed = [&](int b, const Matrix& Mred) -> Matrix {
        return restricted[b] ? Matrix(U[b] * Mred * U[b].transpose()) : Mred;
    };
    auto reduce = [&](int b, const Matrix& Mfull) -> Matrix {
        return restricted[b] ? Matrix(U[b].transpose() * Mfull * U[b]) : Mfull;
    };

    std::vector<Matrix> C(nb);
    for (int b = 0; b < nb; ++b) C[b] = reduce(b, Cfull[b]);

    // Free columns: drop dependent ones whose objective coefficient is implied,
    // so the Schur complement stays positive definite.
    Reduced red;
    {
        const int p = prob.free_count;
        Matrix F = Matrix::Zero(m, p);
        for (int k = 0; k < m; ++k)
            for (const auto& [idx, v] : prob.con_free[k]) F(k, idx) += v;
        Vector q = Vector::Zero(std::max(p, 0));
        for (const auto& [idx, v] : prob.obj_free) q(idx) += v;

        std::vector<int> kept = independent_columns(F, 1e-10);
        if (static_cast<int>(kept.size()) < p) {
            Matrix Fk(m, kept.size());
            Vector qk(kept.size());
            for (size_t i = 0; i < kept.size(); ++i) {
                Fk.col(i) = F.col(kept[i]);
                qk(i) = q(kept[i]);
            }
            // A dropped column must have an objective coefficient consistent
            // with its expansion in the kept columns, otherwise keep it and
            // let the shifted factorization cope.
            Eigen::ColPivHouseholderQR<Matrix> qr(Fk);
            std::vector<char> is_kept(p, 0);
            for (int j : kept) is_kept[j] = 1;
            std::vector<int> extra;
            for (int j = 0; j < p; ++j) {
                if (is_kept[j]) continue;
                if (F.col(j).norm() == 0.0) {
                    if (std::abs(q(j)) > 1e-12) extra.push_back(j);
                    continue;
                }
                Vector lam = qr.solve(F.col(j));
                if (std::abs(q(j) - qk.dot(lam)) > 1e-8 * (1.0 + q.cwiseAbs().maxCoeff()))
                    extra.push_back(j);
            }
            for (int j : extra) kept.push_back(j);
            std::sort(kept.begin(), kept.end());
        }
        red.kept = kept;
        red.F = Matrix(m, kept.size());
        red.q = Vector(kept.size());
        for (size_t i = 0; i < kept.size(); ++i) {
            red.F.col(i) = F.col(kept[i]);
            red.q(i) = q(kept[i]);
        }
    }
    const int p = static_cast<int>(red.kept.size());

    const double rhs_scale = 1.0 + (m > 0 ? prob.rhs.cwiseAbs().maxCoeff() : 0.0);
    double cmax = 0.0;
    for (int b = 0; b < nb; ++b) cmax = std::max(cmax, linalg::max_abs(C[b]));
    const double obj_scale = 1.0 + cmax + (p > 0 ? red.q.cwiseAbs().maxCoeff() : 0.0);

    // --- state (reduced coordinates) ---------------------------------------
    std::vector<Matrix> X(nb), S(nb);
    int Ntot = 0;
    for (int b = 0; b < nb; ++b) {
        X[b] = rhs_scale * Matrix::Identity(rdim[b], rdim[b]);
        S[b] = rhs_scale * Matrix::Identity(rdim[b], rdim[b]);
        Ntot += rdim[b];
    }
    Vector y = Vector::Zero(m);
    Vector u = Vector::Zero(p);

    SdpSolution sol;
    sol.psd_values.resize(nb);
    sol.dual_slacks.resize(nb);

    std::vector<IterateInfo> trace;
    auto record = [&](SdpStatus st, int iters, double relg, double relp, double reld) {
        sol.status = st;
        sol.trace = trace;
        sol.iterations = iters;
        sol.rel_gap = relg;
        sol.rel_primal_res = relp;
        sol.rel_dual_res = reld;
        for (int b = 0; b < nb; ++b) {
            sol.psd_values[b] = embed(b, X[b]);
            sol.dual_slacks[b] = embed(b, S[b]);
        }
        sol.free_values = Vector::Zero(prob.free_count);
        for (int i = 0; i < p; ++i) sol.free_values(red.kept[i]) = u(i);
        sol.dual_values = y;
        double pobj = red.q.dot(u);
        for (int b = 0; b < nb; ++b) pobj += (C[b].array() * X[b].array()).sum();
        sol.primal_obj = pobj;
        sol.dual_obj = prob.rhs.dot(y);
    };

    int tiny_steps = 0;
    double best_score = kInf;
    int best_iter = 0;
    for (int iter = 0; iter <= opts.max_iter; ++iter) {
        // Embedded copies used against the sparse entry lists.
        std::vector<Matrix> Xe(nb);
        for (int b = 0; b < nb; ++b) Xe[b] = embed(b, X[b]);

        // Residuals.
        Vector rp = prob.rhs;
        for (int b = 0; b < nb; ++b)
            for (size_t t = 0; t < bd[b].cons.size(); ++t)
                rp(bd[b].cons[t]) -= dot_full(bd[b].entries[t], Xe[b]);
        if (p > 0) rp -= red.F * u;

        std::vector<Matrix> Rd(nb);
        for (int b = 0; b < nb; ++b) {
            Matrix YA = Matrix::Zero(prob.psd_block_sizes[b], prob.psd_block_sizes[b]);
            for (size_t t = 0; t < bd[b].cons.size(); ++t)
                add_full(YA, bd[b].entries[t], y(bd[b].cons[t]));
            Rd[b] = C[b] - S[b] - reduce(b, YA);
        }
        Vector rf = p > 0 ? (red.q - red.F.transpose() * y).eval() : Vector(0);

        double gap = 0.0;
        for (int b = 0; b < nb; ++b) gap += (X[b].array() * S[b].array()).sum();
        const double mu = gap / Ntot;

        double pobj = red.q.dot(u);
        for (int b = 0; b < nb; ++b) pobj += (C[b].array() * X[b].array()).sum();
        const double dobj = prob.rhs.dot(y);

        double rd_norm = 0.0;
        for (int b = 0; b < nb; ++b) rd_norm = std::max(rd_norm, linalg::max_abs(Rd[b]));
        if (p > 0) rd_norm = std::max(rd_norm, rf.cwiseAbs().maxCoeff());

        const double rel_p = rp.cwiseAbs().maxCoeff() / rhs_scale;
        const double rel_d = rd_norm / obj_scale;
        const double rel_g = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
        trace.push_back({pobj, dobj, rel_p, rel_d});

        if (opts.verbose)
            std::cerr << "iter " << iter << " mu " << mu << " relp " << rel_p << " reld " << rel_d
                      << " relg " << rel_g << " pobj " << pobj << " dobj " << dobj << "\n";

        if (rel_p <= opts.tol && rel_d <= opts.tol && rel_g <= opts.tol) {
            record(SdpStatus::Optimal, iter, rel_g, rel_p, rel_d);
            return sol;
        }
        // Infeasibility heuristics: objective divergence on one side with
        // feasibility on the other.
        if (dobj > 1e9 * rhs_scale && rel_d <= 1e-6) {
            record(SdpStatus::PrimalInfeasible, iter, rel_g, rel_p, rel_d);
            return sol;
        }
        if (pobj < -1e9 * obj_scale && rel_p <= 1e-6) {
            record(SdpStatus::DualInfeasible, iter, rel_g, rel_p, rel_d);
            return sol;
        }
        // No-progress window: degenerate instances plateau well before the
        // iteration cap; stop once the score has not improved for a while.
        const double score = std::max({rel_p, rel_d, rel_g});
        if (score < 0.85 * best_score) {
            best_score = score;
            best_iter = iter;
        }
        if (iter == opts.max_iter || iter - best_iter >= opts.stall_window) {
            record(SdpStatus::Stalled, iter, rel_g, rel_p, rel_d);
            return sol;
        }

        // Factorizations.
        std::vector<Matrix> Sinv(nb), Sinv_e(nb);
        bool factor_ok = true;
        for (int b = 0; b < nb; ++b) {
            Eigen::LLT<Matrix> llt(S[b]);
            if (llt.info() != Eigen::Success) {
                factor_ok = false;
                break;
            }
            Sinv[b] = llt.solve(Matrix::Identity(rdim[b], rdim[b]));
            Sinv_e[b] = embed(b, Sinv[b]);
        }
        if (!factor_ok) {
            record(SdpStatus::Stalled, iter, rel_g, rel_p, rel_d);
            return sol;
        }

        // Schur complement M_kj = tr(A_k X A_j S^{-1}) via embedded matrices.
        Matrix M = Matrix::Zero(m, m);
        for (int b = 0; b < nb; ++b) {
            const int nloc = static_cast<int>(bd[b].cons.size());
            const int s = prob.psd_block_sizes[b];
            Matrix T(s, s);
            for (int tj = 0; tj < nloc; ++tj) {
                T.setZero();
                for (const FullEntry& e : bd[b].entries[tj])
                    T += e.value * (Xe[b].col(e.row) * Sinv_e[b].row(e.col));
                const int j = bd[b].cons[tj];
                for (int tk = 0; tk <= tj; ++tk) {
                    const int k = bd[b].cons[tk];
                    const double v = dot_full(bd[b].entries[tk], T);
                    M(k, j) += v;
                    if (tk != tj) M(j, k) += v;
                }
            }
        }
        M = 0.5 * (M + M.transpose().eval());

        Eigen::LLT<Matrix> Mf;
        Matrix W;   // M^{-1} F
        Matrix G2;  // F^T M^{-1} F
        Eigen::LLT<Matrix> G2f;
        try {
            Mf = linalg::chol_shifted(M);
            if (p > 0) {
                W = Mf.solve(red.F);
                G2 = red.F.transpose() * W;
                G2 = 0.5 * (G2 + G2.transpose().eval());
                G2f = linalg::chol_shifted(G2);
            }
        } catch (const SingularMatrix&) {
            record(SdpStatus::Stalled, iter, rel_g, rel_p, rel_d);
            return sol;
        }

        auto solve_kkt = [&](const Vector& h, const Vector& rfree, Vector& dy, Vector& du) {
            const double hscale = 1.0 + h.cwiseAbs().maxCoeff();
            if (p > 0) {
                du = G2f.solve(W.transpose() * h - rfree);
                dy = Mf.solve(h - red.F * du);
                double prev = kInf;
                for (int pass = 0; pass < 6; ++pass) {
                    Vector r1 = h - M * dy - red.F * du;
                    Vector r2 = rfree - red.F.transpose() * dy;
                    const double res = std::max(r1.cwiseAbs().maxCoeff(), r2.cwiseAbs().maxCoeff());
                    if (res <= 1e-13 * hscale || res >= 0.5 * prev) break;
                    prev = res;
                    Vector cu = G2f.solve(W.transpose() * r1 - r2);
                    Vector cy = Mf.solve(r1 - red.F * cu);
                    du += cu;
                    dy += cy;
                }
            } else {
                dy = Mf.solve(h);
                double prev = kInf;
                for (int pass = 0; pass < 6; ++pass) {
                    Vector r1 = h - M * dy;
                    const double res = r1.cwiseAbs().maxCoeff();
                    if (res <= 1e-13 * hscale || res >= 0.5 * prev) break;
                    prev = res;
                    dy += Mf.solve(r1);
                }
                du = Vector(0);
            }
        };

        // Direction for complementarity target sigma*mu*I - corr.
        auto build_direction = [&](double sigma, const std::vector<Matrix>* corr,
                                   std::vector<Matrix>& dX, std::vector<Matrix>& dS, Vector& dy,
                                   Vector& du) {
            Vector h = rp;
            for (int b = 0; b < nb; ++b) {
                Matrix XRd = X[b] * Rd[b];
                if (corr) XRd += (*corr)[b];
                Matrix G = sigma * mu * Sinv[b] - X[b] -
                           0.5 * (XRd * Sinv[b] + (Sinv[b] * XRd.transpose()).eval());
                Matrix Ge = embed(b, G);
                for (size_t t = 0; t < bd[b].cons.size(); ++t)
                    h(bd[b].cons[t]) -= dot_full(bd[b].entries[t], Ge);
            }

            solve_kkt(h, rf, dy, du);

            dS.resize(nb);
            dX.resize(nb);
            for (int b = 0; b < nb; ++b) {
                Matrix dYA = Matrix::Zero(prob.psd_block_sizes[b], prob.psd_block_sizes[b]);
                for (size_t t = 0; t < bd[b].cons.size(); ++t)
                    add_full(dYA, bd[b].entries[t], dy(bd[b].cons[t]));
                dS[b] = Rd[b] - reduce(b, dYA);
                Matrix XdS = X[b] * dS[b];
                if (corr) XdS += (*corr)[b];
                Matrix D = sigma * mu * Sinv[b] - X[b] -
                           0.5 * (XdS * Sinv[b] + (Sinv[b] * XdS.transpose()).eval());
                dX[b] = 0.5 * (D + D.transpose().eval());
            }
        };

        // Predictor.
        std::vector<Matrix> dXa, dSa;
        Vector dya, dua;
        build_direction(0.0, nullptr, dXa, dSa, dya, dua);

        double ap = 1.0, ad = 1.0;
        for (int b = 0; b < nb; ++b) {
            ap = std::min(ap, step_to_boundary(X[b], dXa[b]));
            ad = std::min(ad, step_to_boundary(S[b], dSa[b]));
        }
        double gap_aff = 0.0;
        for (int b = 0; b < nb; ++b)
            gap_aff += ((X[b] + ap * dXa[b]).array() * (S[b] + ad * dSa[b]).array()).sum();
        const double mu_aff = std::max(gap_aff / Ntot, 0.0);
        double sigma = std::pow(mu_aff / std::max(mu, 1e-300), 3.0);
        sigma = std::clamp(sigma, 1e-10, 1.0);

        // Keep complementarity from racing ahead of feasibility: when the
        // residuals dominate mu, force a centered step so the throttled side
        // can catch up.
        {
            const double rel_mu = mu / (1.0 + std::abs(pobj) + std::abs(dobj));
            const double feas = std::max(rel_p, rel_d);
            if (feas > 10.0 * rel_mu)
                sigma = std::max(sigma, 0.9);
            else if (feas > rel_mu)
                sigma = std::max(sigma, 0.5);
        }

        // Corrector with the Mehrotra second-order term.
        std::vector<Matrix> corr(nb);
        for (int b = 0; b < nb; ++b) corr[b] = dXa[b] * dSa[b];
        std::vector<Matrix> dX, dS;
        Vector dy, du;
        build_direction(sigma, &corr, dX, dS, dy, du);

        double sp = kInf, sd = kInf;
        for (int b = 0; b < nb; ++b) {
            sp = std::min(sp, step_to_boundary(X[b], dX[b]));
            sd = std::min(sd, step_to_boundary(S[b], dS[b]));
        }
        double alpha_p = std::min(1.0, opts.step_fraction * sp);
        double alpha_d = std::min(1.0, opts.step_fraction * sd);
        {
            // Couple the steps while the residuals dominate complementarity.
            const double rel_mu = mu / (1.0 + std::abs(pobj) + std::abs(dobj));
            if (std::max(rel_p, rel_d) > rel_mu) alpha_p = alpha_d = std::min(alpha_p, alpha_d);
        }

        if (opts.verbose) {
            Vector newton_res = rp;
            std::vector<Matrix> dXe(nb);
            for (int b = 0; b < nb; ++b) dXe[b] = embed(b, dX[b]);
            for (int b = 0; b < nb; ++b)
                for (size_t t = 0; t < bd[b].cons.size(); ++t)
                    newton_res(bd[b].cons[t]) -= dot_full(bd[b].entries[t], dXe[b]);
            if (p > 0) newton_res -= red.F * du;
            std::cerr << "    newton |A(dX)+F du - rp| " << newton_res.cwiseAbs().maxCoeff()
                      << " sigma " << sigma << " ap " << alpha_p << " ad " << alpha_d << "\n";
        }

        for (int b = 0; b < nb; ++b) {
            X[b] += alpha_p * dX[b];
            X[b] = 0.5 * (X[b] + X[b].transpose().eval());
            S[b] += alpha_d * dS[b];
            S[b] = 0.5 * (S[b] + S[b].transpose().eval());
        }
        y += alpha_d * dy;
        if (p > 0) u += alpha_p * du;  // u is primal: it moves with X

        if (alpha_p < 1e-8 && alpha_d < 1e-8) {
            if (++tiny_steps >= 3) {
                record(SdpStatus::Stalled, iter + 1, rel_g, rel_p, rel_d);
                return sol;
            }
        } else {
            tiny_steps = 0;
        }
    }

    record(SdpStatus::Stalled, opts.max_iter, 0, 0, 0);
    return sol;
}

}  // namespace mlsos::sdp
