// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mlsos/apps.hpp"
#include "mlsos/hierarchy.hpp"
#include "mlsos/randgen.hpp"
#include "mlsos/sdp.hpp"

using namespace mlsos;
using linalg::Matrix;
using linalg::Vector;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
    std::printf("%s  criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, detail.c_str());
    if (!ok) ++g_failures;
}

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

mlp::MultilinearProgram xy_program() {
    mlp::MultilinearProgram p;
    Vector lo(1), hi(1);
    lo << 0;
    hi << 1;
    p.blocks.push_back(polytope::HPolytope::box(lo, hi));
    p.blocks.push_back(polytope::HPolytope::box(lo, hi));
    p.objective.l = 2;
    p.objective.block_dims = {1, 1};
    p.objective.set(0b11, {0, 0}, 1.0);
    p.sense = mlp::Sense::Max;
    return p;
}

// Shared instance family for criteria 2, 3 and 7: blocks of dim <= 3 with at
// most 6 inequality rows each.
std::vector<mlp::MultilinearProgram> random_suite(std::uint64_t seed, int count) {
    randgen::Rng rng(seed);
    std::vector<mlp::MultilinearProgram> out;
    for (int i = 0; i < count; ++i) {
        std::vector<int> dims = {rng.uniform_int(1, 3), rng.uniform_int(1, 3)};
        const int max_dim = std::max(dims[0], dims[1]);
        const int cuts = std::max(0, std::min(2, 6 - 2 * max_dim));
        out.push_back(randgen::random_program(rng, dims, cuts));
    }
    return out;
}

void criterion1() {
    mlp::MultilinearProgram p = xy_program();
    p.prepare();
    const double t0 = now_seconds();
    hierarchy::HierarchyReport rep = hierarchy::run(p);
    const double dt = now_seconds() - t0;

    bool ok = rep.status == hierarchy::RunStatus::ConvergedCertified;
    std::ostringstream de;
    if (rep.orders.empty() || rep.orders[0].t != 2) ok = false;
    const double f2 = rep.orders.empty() ? 0.0 : rep.orders[0].f_t;
    if (std::abs(f2 - 1.0) > 1e-6) ok = false;
    const double resid = rep.orders.empty() ? 1.0 : rep.orders[0].cert_report.max_residual;
    if (resid > 1e-8) ok = false;
    if (dt >= 1.0) ok = false;
    de.precision(3);
    de << "unit bilinear: f_2 = " << std::scientific << f2 << ", residual " << resid << ", "
       << hierarchy::to_string(rep.status) << ", " << dt << " s";
    report(1, ok, de.str());
}

struct SuiteRun {
    std::vector<mlp::MultilinearProgram> programs;   // prepared
    std::vector<mlp::OracleResult> oracle;
    std::vector<hierarchy::HierarchyReport> reports;
    double seconds = 0.0;
};

SuiteRun run_suite() {
    SuiteRun sr;
    sr.programs = random_suite(1, 20);
    const double t0 = now_seconds();
    for (auto& p : sr.programs) {
        p.prepare();
        sr.oracle.push_back(mlp::vertex_oracle(p));
        sr.reports.push_back(hierarchy::run(p));
    }
    sr.seconds = now_seconds() - t0;
    return sr;
}

void criterion2(const SuiteRun& sr) {
    bool ok = true;
    std::ostringstream de;
    int orders_checked = 0;
    for (size_t i = 0; i < sr.programs.size(); ++i) {
        const double fstar = sr.oracle[i].value;
        double prev = std::numeric_limits<double>::infinity();
        for (const auto& r : sr.reports[i].orders) {
            if (!r.usable) continue;
            ++orders_checked;
            if (r.f_t < fstar - 1e-6 * (1.0 + std::abs(fstar))) {
                ok = false;
                de << " [instance " << i << " t=" << r.t << " unsound: f_t=" << r.f_t
                   << " < f*=" << fstar << "]";
            }
            if (r.f_t > prev + 1e-7 * (1.0 + std::abs(prev))) {
                ok = false;
                de << " [instance " << i << " t=" << r.t << " not monotone]";
            }
            prev = r.f_t;
        }
    }
    if (sr.seconds >= 120.0) {
        ok = false;
        de << " [runtime budget exceeded]";
    }
    std::ostringstream head;
    head.precision(3);
    head << "soundness/monotonicity on 20 seeded instances (" << orders_checked << " solved orders, "
         << sr.seconds << " s)" << de.str();
    report(2, ok, head.str());
}

void criterion3(const SuiteRun& sr) {
    int finite = 0, converged = 0;
    std::ostringstream misses;
    for (size_t i = 0; i < sr.programs.size(); ++i) {
        if (!mlp::optima_are_finite(sr.oracle[i], const_cast<mlp::MultilinearProgram&>(sr.programs[i])))
            continue;
        ++finite;
        const auto& rep = sr.reports[i];
        const bool conv = rep.status == hierarchy::RunStatus::ConvergedCertified &&
                          rep.gap <= 1e-5 * (1.0 + std::abs(rep.best_upper));
        if (conv)
            ++converged;
        else
            misses << " [instance " << i << ": " << hierarchy::to_string(rep.status) << ", gap "
                   << rep.gap << "]";
    }
    const double rate = finite > 0 ? static_cast<double>(converged) / finite : 1.0;
    std::ostringstream de;
    de << "finite-optima instances: " << converged << "/" << finite
       << " certified by t <= l+3" << misses.str();
    report(3, rate >= 0.9, de.str());
}

void criterion4() {
    randgen::Rng rng(42);
    bool ok = true;
    std::ostringstream de;
    double worst_oracle = 0.0, worst_value = 0.0;
    for (int i = 0; i < 10; ++i) {
        const int m = (i % 2 == 0) ? 2 : 3;
        const int n = m;
        Matrix A(m, n), B(m, n);
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < n; ++c) {
                A(r, c) = rng.uniform(0.1, 2.0);
                B(r, c) = rng.uniform(0.1, 2.0);
            }
        apps::BimatrixGame g = apps::shift_positive(A, B);
        mlp::MultilinearProgram p = apps::game_to_mlp(g);
        p.prepare();
        auto orc = mlp::vertex_oracle(p);
        worst_oracle = std::max(worst_oracle, std::abs(orc.value));
        if (std::abs(orc.value) > 1e-9) {
            ok = false;
            de << " [game " << i << " oracle " << orc.value << "]";
        }
        auto rep = hierarchy::run(p);
        const double v = rep.best_upper;
        worst_value = std::max(worst_value, std::abs(v));
        if (!(rep.status == hierarchy::RunStatus::ConvergedCertified && std::abs(v) <= 1e-5)) {
            ok = false;
            de << " [game " << i << " hierarchy " << hierarchy::to_string(rep.status) << " value "
               << v << "]";
        }
    }
    std::ostringstream head;
    head.precision(3);
    head << "game value identity on 10 random games (worst oracle " << std::scientific
         << worst_oracle << ", worst hierarchy value " << worst_value << ")" << de.str();
    report(4, ok, head.str());
}

void criterion5() {
    const double t0 = now_seconds();
    bool ok = true;
    std::ostringstream de;

    Matrix A(2, 2), B(2, 2);
    A << 1, -1, -1, 1;
    B = -A;
    auto rp = apps::solve_game(apps::shift_positive(A, B));
    for (int i = 0; i < 2; ++i) {
        if (std::abs(rp.equilibrium.x_hat(i) - 0.5) > 1e-4) ok = false;
        if (std::abs(rp.equilibrium.y_hat(i) - 0.5) > 1e-4) ok = false;
    }
    if (std::abs(rp.equilibrium.payoff1) > 1e-6 || std::abs(rp.equilibrium.payoff2) > 1e-6) ok = false;
    if (!apps::is_equilibrium(A, B, rp.equilibrium.x_hat, rp.equilibrium.y_hat, 1e-6)) ok = false;

    Matrix Ad(2, 2), Bd(2, 2);
    Ad << 3, 0, 5, 1;
    Bd << 3, 5, 0, 1;
    auto rd = apps::solve_game(apps::shift_positive(Ad, Bd));
    if (std::abs(rd.equilibrium.x_hat(1) - 1.0) > 1e-6 || std::abs(rd.equilibrium.y_hat(1) - 1.0) > 1e-6)
        ok = false;
    if (std::abs(rd.equilibrium.payoff1 - 1.0) > 1e-6 || std::abs(rd.equilibrium.payoff2 - 1.0) > 1e-6)
        ok = false;
    if (!apps::is_equilibrium(Ad, Bd, rd.equilibrium.x_hat, rd.equilibrium.y_hat, 1e-6)) ok = false;

    const double dt = now_seconds() - t0;
    if (dt >= 30.0) ok = false;
    de.precision(3);
    de << "matching pennies -> ((" << rp.equilibrium.x_hat(0) << "," << rp.equilibrium.x_hat(1)
       << "),(" << rp.equilibrium.y_hat(0) << "," << rp.equilibrium.y_hat(1)
       << ")); prisoner's dilemma -> defect/defect; " << dt << " s";
    report(5, ok, de.str());
}

apps::ContainmentInstance interval_instance(double extent) {
    apps::ContainmentInstance c;
    c.P_A = Matrix(2, 1);
    c.P_A << 1, -1;
    c.P_a = Vector(2);
    c.P_a << extent, extent;
    c.Q_B = Matrix(3, 1);
    c.Q_B << 1, -1, 0;
    c.Q_b = Vector(3);
    c.Q_b << 0, 0, 1;
    c.Q_Bprime = Matrix(3, 1);
    c.Q_Bprime << -1, -1, 1;
    return c;
}

void criterion6() {
    bool ok = true;
    std::ostringstream de;

    auto v1 = apps::decide_containment(interval_instance(1.0));
    if (!(v1.decision == apps::ContainmentDecision::Contained && v1.tight &&
          std::abs(v1.certified_lower) <= 1e-5)) {
        ok = false;
        de << " [interval 1: " << apps::to_string(v1.decision) << " bound " << v1.certified_lower
           << "]";
    }
    auto v2 = apps::decide_containment(interval_instance(2.0));
    if (!(v2.decision == apps::ContainmentDecision::NotContained &&
          v2.certified_lower <= -0.5 + 1e-5)) {
        ok = false;
        de << " [interval 2: " << apps::to_string(v2.decision) << " bound " << v2.certified_lower
           << "]";
    }

    // 50 random H-in-H instances, d <= 3, B' empty, 3 rows on the Q side.
    randgen::Rng rng(7);
    int agreements = 0, inconclusive = 0, mismatches = 0, bad_inconclusive = 0;
    for (int i = 0; i < 50; ++i) {
        const int d = rng.uniform_int(1, 3);
        polytope::HPolytope P = randgen::random_polytope(rng, d, rng.uniform_int(0, 2));
        apps::ContainmentInstance c;
        c.P_A = P.A;
        c.P_a = P.a;
        const int rows = 3;
        c.Q_B = Matrix(rows, d);
        c.Q_b = Vector(rows);
        c.Q_Bprime = Matrix(0, 0);

        polytope::HPolytope Pn = polytope::normalize(P);
        polytope::VertexSet vs = polytope::vertices(Pn);
        for (int k = 0; k < rows; ++k) {
            Vector u(d);
            for (int j = 0; j < d; ++j) u(j) = rng.uniform(-1, 1);
            if (u.norm() < 1e-9) u(0) = 1.0;
            double vmax = -1e300;
            for (const auto& v : vs.vertices) vmax = std::max(vmax, u.dot(v));
            c.Q_B.row(k) = u.transpose();
            c.Q_b(k) = vmax + rng.uniform(-0.3, 0.5);
        }

        // Direct oracle: min over vertices and rows of the slack, classified
        // at the same tolerance the decision procedure uses.
        double true_min = 1e300;
        for (const auto& v : vs.vertices)
            true_min = std::min(true_min, (c.Q_b - c.Q_B * v).minCoeff());
        const bool truly_contained = true_min >= -1e-6;

        auto verdict = apps::decide_containment(c);
        if (verdict.decision == apps::ContainmentDecision::Inconclusive) {
            ++inconclusive;
            if (std::abs(true_min) > 1e-5) {
                ++bad_inconclusive;
                de << " [hh " << i << " inconclusive but true min " << true_min << "]";
            }
            continue;
        }
        const bool said_contained = verdict.decision == apps::ContainmentDecision::Contained;
        if (said_contained == truly_contained) {
            ++agreements;
        } else {
            ++mismatches;
            de << " [hh " << i << " " << apps::to_string(verdict.decision) << " but true min "
               << true_min << "]";
        }
    }
    if (mismatches > 0 || bad_inconclusive > 0) ok = false;
    std::ostringstream head;
    head << "containment: intervals decided (bounds " << v1.certified_lower << ", "
         << v2.certified_lower << "); H-in-H " << agreements << " agree, " << inconclusive
         << " inconclusive, " << mismatches << " mismatches" << de.str();
    report(6, ok, head.str());
}

void criterion7(const SuiteRun& sr) {
    bool ok = true;
    std::ostringstream de;

    // One facet far outside every block of each probe instance: the unit
    // instance plus the first three of the random suite.
    std::vector<mlp::MultilinearProgram> probes;
    probes.push_back(xy_program());
    {
        auto fresh = random_suite(1, 3);
        for (auto& p : fresh) probes.push_back(std::move(p));
    }
    int checked = 0;
    for (size_t pi = 0; pi < probes.size(); ++pi) {
        mlp::MultilinearProgram base = probes[pi];
        mlp::MultilinearProgram padded = probes[pi];
        auto& blk = padded.blocks[0];
        const int m0 = blk.num_ineq();
        blk.A.conservativeResize(m0 + 1, blk.dim);
        blk.a.conservativeResize(m0 + 1);
        blk.A.row(m0).setZero();
        blk.A(m0, 0) = 1.0;
        blk.a(m0) = 50.0;  // every block here lives inside [0,1]^d
        base.prepare(/*strip_redundant=*/false);
        padded.prepare(/*strip_redundant=*/false);
        const int l = base.l();
        for (int t = l; t <= l + 1; ++t) {
            auto r1 = hierarchy::solve_order(base, t);
            auto r2 = hierarchy::solve_order(padded, t);
            if (!r1.usable || !r2.usable) continue;
            ++checked;
            if (std::abs(r1.f_t - r2.f_t) > 1e-6) {
                ok = false;
                de << " [probe " << pi << " t=" << t << ": " << r1.f_t << " vs " << r2.f_t << "]";
            }
        }
    }
    std::ostringstream head;
    head << "redundant facet moves f_t by <= 1e-6 on " << checked << " solved orders" << de.str();
    report(7, ok && checked >= 4, head.str());
}

void criterion8() {
    bool ok = true;
    std::ostringstream de;

    // Analytic SDP 1: min tr X, X11 = 1.
    {
        sdp::SdpProblem p;
        p.psd_block_sizes = {2};
        p.obj_mats = {{0, 0, 0, 1.0}, {0, 1, 1, 1.0}};
        p.con_mats = {{{0, 0, 0, 1.0}}};
        p.con_free = {{}};
        p.rhs = Vector::Ones(1);
        auto s = sdp::solve_sdp(p);
        if (!(s.status == sdp::SdpStatus::Optimal && std::abs(s.primal_obj - 1.0) <= 1e-6)) {
            ok = false;
            de << " [analytic 1 failed]";
        }
    }
    // Analytic SDP 2: free variable, min mu s.t. mu - <I,X> = 1.
    {
        sdp::SdpProblem p;
        p.psd_block_sizes = {1};
        p.free_count = 1;
        p.obj_free = {{0, 1.0}};
        p.con_mats = {{{0, 0, 0, -1.0}}};
        p.con_free = {{{0, 1.0}}};
        p.rhs = Vector::Ones(1);
        auto s = sdp::solve_sdp(p);
        if (!(s.status == sdp::SdpStatus::Optimal && std::abs(s.primal_obj - 1.0) <= 1e-6)) {
            ok = false;
            de << " [analytic 2 failed]";
        }
    }
    // Analytic SDP 3: hierarchy compile of max xy at t=2.
    {
        mlp::MultilinearProgram p = xy_program();
        p.prepare();
        auto co = hierarchy::compile(p, 2);
        auto s = sdp::solve_sdp(co.sdp);
        if (!(s.status == sdp::SdpStatus::Optimal && std::abs(s.primal_obj - 1.0) <= 1e-6)) {
            ok = false;
            de << " [analytic 3 failed]";
        }
    }
    // Planted family.
    {
        randgen::Rng rng(99);
        for (int rep = 0; rep < 20; ++rep) {
            const int s = rng.uniform_int(2, 5);
            const int m = rng.uniform_int(1, s);
            Matrix R(s, s);
            for (int i = 0; i < s; ++i)
                for (int j = 0; j < s; ++j) R(i, j) = rng.uniform(-1, 1);
            Eigen::HouseholderQR<Matrix> qr(R);
            Matrix U = qr.householderQ();
            const int r = std::max(1, s - 1);  // Slater on both sides a.s.
            Vector dx = Vector::Zero(s), ds = Vector::Zero(s);
            for (int i = 0; i < r; ++i) dx(i) = rng.uniform(0.5, 2.0);
            for (int i = r; i < s; ++i) ds(i) = rng.uniform(0.5, 2.0);
            Matrix Xs = U * dx.asDiagonal() * U.transpose();
            Matrix Ss = U * ds.asDiagonal() * U.transpose();
            std::vector<Matrix> A(m);
            Vector y(m);
            Matrix C = Ss;
            sdp::SdpProblem prob;
            prob.psd_block_sizes = {s};
            prob.rhs = Vector(m);
            for (int k = 0; k < m; ++k) {
                Matrix W(s, s);
                for (int i = 0; i < s; ++i)
                    for (int j = 0; j < s; ++j) W(i, j) = rng.uniform(-1, 1);
                A[k] = 0.5 * (W + W.transpose());
                y(k) = rng.uniform(-1, 1);
                C += y(k) * A[k];
                std::vector<sdp::MatEntry> entries;
                for (int i = 0; i < s; ++i)
                    for (int j = i; j < s; ++j) entries.push_back({0, i, j, A[k](i, j)});
                prob.con_mats.push_back(std::move(entries));
                prob.con_free.push_back({});
                prob.rhs(k) = (A[k].array() * Xs.array()).sum();
            }
            for (int i = 0; i < s; ++i)
                for (int j = i; j < s; ++j) prob.obj_mats.push_back({0, i, j, C(i, j)});
            const double planted = (C.array() * Xs.array()).sum();
            auto sol = sdp::solve_sdp(prob);
            if (!(sol.status == sdp::SdpStatus::Optimal &&
                  std::abs(sol.primal_obj - planted) <= 1e-5 * (1.0 + std::abs(planted)))) {
                ok = false;
                de << " [planted " << rep << ": got " << sol.primal_obj << " want " << planted << "]";
            }
        }
    }
    // Gradient finite differences on 50 random forms.
    {
        randgen::Rng rng(13);
        int bad = 0;
        for (int rep = 0; rep < 50; ++rep) {
            const int l = rng.uniform_int(2, 3);
            std::vector<int> dims;
            for (int i = 0; i < l; ++i) dims.push_back(rng.uniform_int(1, 3));
            mlp::MultilinearProgram p = randgen::random_program(rng, dims, 0);
            mlp::BlockPoint x;
            for (int i = 0; i < l; ++i) {
                Vector v(dims[i]);
                for (int k = 0; k < dims[i]; ++k) v(k) = rng.uniform(-1, 1);
                x.push_back(v);
            }
            for (int blk = 0; blk < l; ++blk) {
                const Vector g = mlp::grad_block(p.objective, x, blk);
                for (int k = 0; k < dims[blk]; ++k) {
                    mlp::BlockPoint xp = x, xm = x;
                    const double h = 1e-5;
                    xp[blk](k) += h;
                    xm[blk](k) -= h;
                    const double fd =
                        (mlp::eval(p.objective, xp) - mlp::eval(p.objective, xm)) / (2 * h);
                    if (std::abs(g(k) - fd) > 1e-6 * (1.0 + std::abs(fd))) ++bad;
                }
            }
        }
        if (bad > 0) {
            ok = false;
            de << " [" << bad << " gradient mismatches]";
        }
    }
    report(8, ok, "solver unit suite: analytic SDPs, planted family, gradient checks" + de.str());
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion1();
    SuiteRun sr = run_suite();
    criterion2(sr);
    criterion3(sr);
    criterion4();
    criterion5();
    criterion6();
    criterion7(sr);
    criterion8();
    std::printf("%d criteria failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
