#include "mlsos/hierarchy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>

#include "mlsos/lp.hpp"

namespace mlsos::hierarchy {

namespace {

using TermList = std::vector<std::pair<Monomial, double>>;  // linear generator terms

// a_row - <A_row, x_block> as (monomial, coeff) terms over the joint variables.
TermList linear_generator(int n, int offset, const Vector& row_coeffs, double rhs_val) {
    TermList terms;
    terms.emplace_back(Monomial::one(n), rhs_val);
    for (int k = 0; k < row_coeffs.size(); ++k)
        if (row_coeffs(k) != 0.0) terms.emplace_back(Monomial::var(n, offset + k), -row_coeffs(k));
    return terms;
}

Poly terms_to_poly(int n, const TermList& terms) {
    Poly p(n);
    for (const auto& [mono, c] : terms) p.add_term(mono, c);
    return p;
}

Poly gram_to_poly(int n, const std::vector<Monomial>& basis, const Matrix& G) {
    Poly p(n);
    const int s = static_cast<int>(basis.size());
    for (int i = 0; i < s; ++i) {
        p.add_term(basis[i] * basis[i], G(i, i));
        for (int j = i + 1; j < s; ++j) p.add_term(basis[i] * basis[j], 2.0 * G(i, j));
    }
    return p;
}

}  // namespace

const char* to_string(RunStatus s) {
    switch (s) {
        case RunStatus::ConvergedCertified: return "converged_certified";
        case RunStatus::OrderCapReached: return "order_cap_reached";
        case RunStatus::SolverTrouble: return "solver_trouble";
    }
    return "unknown";
}

CompiledOrder compile(const mlp::MultilinearProgram& p, int t, Sigma0Mode mode) {
    if (!p.prepared) throw DimensionMismatch("compile: program must be prepared");
    const int l = p.l();
    if (t < l)
        throw OrderTooSmall("compile: order " + std::to_string(t) + " below degree of the objective (" +
                            std::to_string(l) + ")");

    CompiledOrder co;
    co.t = t;
    co.mode = mode;
    const int n = p.total_vars();
    co.n = n;

    const int s0_deg = (mode == Sigma0Mode::Deg2t) ? t : t - 1;
    co.basis_sigma0 = poly::basis(n, s0_deg);
    co.basis_ineq = poly::basis(n, t - 1);
    co.basis_tau = poly::basis(n, 2 * t - 1);
    std::vector<Monomial> all_rows = poly::basis(n, 2 * t);

    std::map<Monomial, int, poly::GradedLexLess> row_of;
    for (size_t i = 0; i < all_rows.size(); ++i) row_of.emplace(all_rows[i], static_cast<int>(i));

    // Generators over the joint variables.
    std::vector<TermList> ineq_gen, eq_gen;
    for (int i = 0; i < l; ++i) {
        const auto& blk = p.blocks[i];
        const int off = p.objective.var_offset(i);
        for (int j = 0; j < blk.num_ineq(); ++j) {
            ineq_gen.push_back(linear_generator(n, off, blk.A.row(j), blk.a(j)));
            co.ineq_labels.emplace_back(i, j);
        }
        for (int j = 0; j < blk.num_eq(); ++j) {
            eq_gen.push_back(linear_generator(n, off, blk.B.row(j), blk.b(j)));
            co.eq_labels.emplace_back(i, j);
        }
    }

    sdp::SdpProblem& sp = co.sdp;
    const int m = static_cast<int>(all_rows.size());
    sp.psd_block_sizes.push_back(static_cast<int>(co.basis_sigma0.size()));
    for (size_t g = 0; g < ineq_gen.size(); ++g)
        sp.psd_block_sizes.push_back(static_cast<int>(co.basis_ineq.size()));
    sp.free_count = 1 + static_cast<int>(eq_gen.size() * co.basis_tau.size());
    sp.con_mats.assign(m, {});
    sp.con_free.assign(m, {});
    sp.rhs = Vector::Zero(m);

    // With equality generators, each Gram block is restricted to the
    // orthogonal complement of the ideal slice span{h_e x^beta}. The tau
    // multipliers absorb exactly the dropped directions, so f_t is unchanged
    // while both sides of the SDP regain strict feasibility.
    if (!eq_gen.empty()) {
        auto quotient_range = [&](const std::vector<Monomial>& gram_basis, int mult_deg) -> Matrix {
            const int s = static_cast<int>(gram_basis.size());
            std::map<Monomial, int, poly::GradedLexLess> pos;
            for (int i = 0; i < s; ++i) pos.emplace(gram_basis[i], i);
            const std::vector<Monomial> mults = poly::basis(n, mult_deg);
            Matrix H = Matrix::Zero(s, eq_gen.size() * mults.size());
            int col = 0;
            for (const auto& h : eq_gen)
                for (const auto& beta : mults) {
                    for (const auto& [hm, hc] : h) H(pos.at(beta * hm), col) += hc;
                    ++col;
                }
            Eigen::ColPivHouseholderQR<Matrix> qr(H);
            qr.setThreshold(1e-10);
            const int r = static_cast<int>(qr.rank());
            if (r == 0) return Matrix();
            Matrix Q = qr.householderQ();
            return Q.rightCols(s - r);
        };
        sp.block_ranges.resize(sp.psd_block_sizes.size());
        sp.block_ranges[0] = quotient_range(co.basis_sigma0, s0_deg - 1);
        const Matrix ineq_range = quotient_range(co.basis_ineq, t - 2);
        for (size_t g = 0; g < ineq_gen.size(); ++g) sp.block_ranges[1 + g] = ineq_range;
    }

    // sigma_0 Gram: coefficient matching rows get -1 indicators.
    {
        const int s = static_cast<int>(co.basis_sigma0.size());
        for (int i = 0; i < s; ++i)
            for (int j = i; j < s; ++j) {
                const int r = row_of.at(co.basis_sigma0[i] * co.basis_sigma0[j]);
                sp.con_mats[r].push_back({0, i, j, -1.0});
            }
    }
    // Inequality multipliers: sigma_ij * g_ij.
    for (size_t g = 0; g < ineq_gen.size(); ++g) {
        const int blk = 1 + static_cast<int>(g);
        const int s = static_cast<int>(co.basis_ineq.size());
        for (int i = 0; i < s; ++i)
            for (int j = i; j < s; ++j) {
                const Monomial base = co.basis_ineq[i] * co.basis_ineq[j];
                for (const auto& [gm, gc] : ineq_gen[g]) {
                    const int r = row_of.at(base * gm);
                    sp.con_mats[r].push_back({blk, i, j, -gc});
                }
            }
    }
    // mu and tau free variables.
    sp.con_free[row_of.at(Monomial::one(n))].push_back({0, 1.0});
    for (size_t e = 0; e < eq_gen.size(); ++e) {
        for (size_t bidx = 0; bidx < co.basis_tau.size(); ++bidx) {
            const int fidx = 1 + static_cast<int>(e * co.basis_tau.size() + bidx);
            for (const auto& [hm, hc] : eq_gen[e]) {
                const int r = row_of.at(co.basis_tau[bidx] * hm);
                sp.con_free[r].push_back({fidx, -hc});
            }
        }
    }
    // Right-hand side: coefficients of the objective.
    {
        const Poly f = mlp::to_poly(p.objective);
        for (const auto& [mono, c] : f.terms()) sp.rhs(row_of.at(mono)) += c;
    }
    sp.obj_free.push_back({0, 1.0});  // minimize mu

    // In the literal 2t-2 mode the top-degree rows can be entirely empty; drop them.
    std::vector<int> kept_rows;
    for (int r = 0; r < m; ++r) {
        if (!sp.con_mats[r].empty() || !sp.con_free[r].empty()) {
            kept_rows.push_back(r);
        } else if (std::abs(sp.rhs(r)) > 1e-14) {
            throw DimensionMismatch("compile: empty coefficient row with nonzero objective coefficient");
        }
    }
    if (static_cast<int>(kept_rows.size()) < m) {
        std::vector<std::vector<sdp::MatEntry>> cm;
        std::vector<std::vector<std::pair<int, double>>> cf;
        Vector rv(kept_rows.size());
        std::vector<Monomial> rows;
        for (size_t i = 0; i < kept_rows.size(); ++i) {
            cm.push_back(std::move(sp.con_mats[kept_rows[i]]));
            cf.push_back(std::move(sp.con_free[kept_rows[i]]));
            rv(i) = sp.rhs(kept_rows[i]);
            rows.push_back(all_rows[kept_rows[i]]);
        }
        sp.con_mats = std::move(cm);
        sp.con_free = std::move(cf);
        sp.rhs = std::move(rv);
        co.rows = std::move(rows);
    } else {
        co.rows = std::move(all_rows);
    }
    return co;
}

CertificateReport verify_certificate(const mlp::MultilinearProgram& p, const TruncatedCertificate& cert) {
    const int n = p.total_vars();
    const int t = cert.t;
    const int l = p.l();
    if (t < l) throw DimensionMismatch("verify_certificate: order below block count");

    const std::vector<Monomial> b_ineq = poly::basis(n, t - 1);
    const std::vector<Monomial> b0_full = poly::basis(n, t);
    const std::vector<Monomial> b0_lit = poly::basis(n, t - 1);

    const std::vector<Monomial>* b0 = nullptr;
    if (cert.gram0.rows() == static_cast<int>(b0_full.size()))
        b0 = &b0_full;
    else if (cert.gram0.rows() == static_cast<int>(b0_lit.size()))
        b0 = &b0_lit;
    else
        throw DimensionMismatch("verify_certificate: gram0 size matches no sigma0 basis at this order");

    int n_ineq = 0, n_eq = 0;
    for (const auto& blk : p.blocks) {
        n_ineq += blk.num_ineq();
        n_eq += blk.num_eq();
    }
    if (static_cast<int>(cert.gram_ineq.size()) != n_ineq)
        throw DimensionMismatch("verify_certificate: inequality multiplier count mismatch");
    if (static_cast<int>(cert.tau.size()) != n_eq)
        throw DimensionMismatch("verify_certificate: equality multiplier count mismatch");
    for (const Matrix& G : cert.gram_ineq)
        if (G.rows() != static_cast<int>(b_ineq.size()))
            throw DimensionMismatch("verify_certificate: inequality Gram size mismatch");

    Poly residual = Poly::constant(n, cert.mu) - mlp::to_poly(p.objective);
    residual -= gram_to_poly(n, *b0, cert.gram0);

    int gi = 0, ei = 0;
    for (int bi = 0; bi < p.l(); ++bi) {
        const auto& blk = p.blocks[bi];
        const int off = p.objective.var_offset(bi);
        for (int j = 0; j < blk.num_ineq(); ++j, ++gi) {
            const Poly g = terms_to_poly(n, linear_generator(n, off, blk.A.row(j), blk.a(j)));
            residual -= gram_to_poly(n, b_ineq, cert.gram_ineq[gi]) * g;
        }
        for (int j = 0; j < blk.num_eq(); ++j, ++ei) {
            const Poly h = terms_to_poly(n, linear_generator(n, off, blk.B.row(j), blk.b(j)));
            residual -= cert.tau[ei] * h;
        }
    }

    CertificateReport rep;
    rep.max_residual = residual.max_abs_coeff();
    double lmin = 0.0;
    {
        auto [ok0, l0] = sdp::check_psd(cert.gram0, 1e-7);
        lmin = l0;
        (void)ok0;
        for (const Matrix& G : cert.gram_ineq) {
            auto [ok, lm] = sdp::check_psd(G, 1e-7);
            (void)ok;
            lmin = std::min(lmin, lm);
        }
    }
    rep.min_gram_eigenvalue = lmin;
    rep.passed = rep.max_residual <= 1e-6 * (1.0 + std::abs(cert.mu)) && lmin >= -1e-7;
    return rep;
}

namespace {

// L1 projection of a point onto one block when it is more than mildly infeasible.
Vector project_onto_block(const polytope::HPolytope& blk, const Vector& x0) {
    if (polytope::contains_point(blk, x0, 1e-8)) return x0;
    const int d = blk.dim;
    const int m = blk.num_ineq();
    const int ne = blk.num_eq();
    Matrix G(2 * d + m, 2 * d);
    Vector g(2 * d + m);
    G.setZero();
    G.block(0, 0, d, d) = Matrix::Identity(d, d);
    G.block(0, d, d, d) = -Matrix::Identity(d, d);
    g.head(d) = x0;
    G.block(d, 0, d, d) = -Matrix::Identity(d, d);
    G.block(d, d, d, d) = -Matrix::Identity(d, d);
    g.segment(d, d) = -x0;
    if (m > 0) {
        G.block(2 * d, 0, m, d) = blk.A;
        g.tail(m) = blk.a;
    }
    Matrix E(ne, 2 * d);
    E.setZero();
    if (ne > 0) E.block(0, 0, ne, d) = blk.B;
    Vector c = Vector::Zero(2 * d);
    c.tail(d).setOnes();
    lp::LpResult r = lp::solve_lp(lp::LpProblem::minimize(c, G, g, E, blk.b));
    if (r.status != lp::LpStatus::Optimal) return x0;
    return r.point.head(d).eval();
}

}  // namespace

OrderResult solve_order(mlp::MultilinearProgram& p, int t, const RunOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    OrderResult out;
    out.t = t;

    CompiledOrder co = compile(p, t, opts.sigma0);

    sdp::SdpOptions sopts;
    sopts.tol = opts.sdp_tol;
    sopts.max_iter = opts.sdp_max_iter;
    sopts.verbose = opts.verbose;
    sdp::SdpSolution sol = sdp::solve_sdp(co.sdp, sopts);
    out.sdp_status = sol.status;

    if (sol.status == sdp::SdpStatus::PrimalInfeasible) {
        out.relaxation_infeasible = true;
        out.f_t = std::numeric_limits<double>::infinity();
        out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return out;
    }

    // Moments from the constraint duals.
    for (size_t i = 0; i < co.rows.size(); ++i) out.moments.emplace(co.rows[i], sol.dual_values(i));

    // Candidate point from first-order moments, clipped into each block.
    {
        const int n = co.n;
        Vector xm(n);
        bool have_all = true;
        for (int k = 0; k < n; ++k) {
            auto it = out.moments.find(Monomial::var(n, k));
            if (it == out.moments.end()) {
                have_all = false;
                break;
            }
            xm(k) = it->second;
        }
        if (have_all) {
            mlp::BlockPoint bp = mlp::split(p.objective, xm);
            for (int i = 0; i < p.l(); ++i) bp[i] = project_onto_block(p.blocks[i], bp[i]);
            out.candidate = std::move(bp);
        }
    }

    // Certificate: Grams and multipliers from the primal solution.
    {
        TruncatedCertificate cert;
        cert.t = t;
        cert.mu = sol.free_values(0);
        cert.gram0 = sol.psd_values[0];
        for (size_t g = 0; g < co.ineq_labels.size(); ++g) cert.gram_ineq.push_back(sol.psd_values[1 + g]);
        const int n = co.n;
        for (size_t e = 0; e < co.eq_labels.size(); ++e) {
            Poly tau(n);
            for (size_t bidx = 0; bidx < co.basis_tau.size(); ++bidx)
                tau.add_term(co.basis_tau[bidx], sol.free_values(1 + e * co.basis_tau.size() + bidx));
            cert.tau.push_back(std::move(tau));
        }
        out.cert_report = verify_certificate(p, cert);
        out.certificate = std::move(cert);
    }

    out.f_t = sol.primal_obj;
    out.usable = out.cert_report.passed &&
                 (sol.status == sdp::SdpStatus::Optimal || sol.status == sdp::SdpStatus::Stalled);
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

HierarchyReport run(mlp::MultilinearProgram& p, const RunOptions& opts) {
    if (!p.prepared) throw DimensionMismatch("run: program must be prepared");
    HierarchyReport rep;
    const int l = p.l();
    const int t_min = opts.t_min > 0 ? opts.t_min : l;
    const int t_max = opts.t_max > 0 ? opts.t_max : l + 3;
    const int n = p.total_vars();

    auto consider = [&](const mlp::BlockPoint& start) {
        mlp::LocalSearchResult ls = mlp::local_search(p, start);
        if (ls.value > rep.best_lower) {
            rep.best_lower = ls.value;
            rep.witness = ls.point;
        }
    };

    // Default starts: the relative-interior points found during preparation.
    {
        mlp::BlockPoint start;
        bool ok = true;
        for (const auto& blk : p.blocks) {
            if (!blk.interior_point) {
                ok = false;
                break;
            }
            start.push_back(*blk.interior_point);
        }
        if (ok) consider(start);
    }

    bool trouble = false;
    for (int t = t_min; t <= t_max; ++t) {
        if (poly::basis_size(n, 2 * t) > opts.max_constraints) {
            rep.notes.push_back("order " + std::to_string(t) + " skipped: " +
                                std::to_string(poly::basis_size(n, 2 * t)) +
                                " coefficient rows exceed the configured limit");
            break;
        }
        OrderResult r = solve_order(p, t, opts);
        if (r.usable) rep.best_upper = std::min(rep.best_upper, r.f_t);
        if (!r.usable && !r.relaxation_infeasible) {
            trouble = true;
            rep.notes.push_back("order " + std::to_string(t) + ": sdp status " +
                                sdp::to_string(r.sdp_status) + ", certificate residual " +
                                std::to_string(r.cert_report.max_residual));
        }
        if (r.candidate) consider(*r.candidate);
        rep.orders.push_back(std::move(r));

        rep.gap = rep.best_upper - rep.best_lower;
        if (std::isfinite(rep.gap) && rep.gap <= opts.tol * (1.0 + std::abs(rep.best_upper))) {
            rep.status = RunStatus::ConvergedCertified;
            return rep;
        }
    }
    rep.gap = rep.best_upper - rep.best_lower;
    rep.status = trouble ? RunStatus::SolverTrouble : RunStatus::OrderCapReached;
    return rep;
}

}  // namespace mlsos::hierarchy
