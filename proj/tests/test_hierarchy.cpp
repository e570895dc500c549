#include <doctest.h>

#include <cmath>

#include "mlsos/apps.hpp"
#include "mlsos/hierarchy.hpp"
#include "mlsos/randgen.hpp"

using namespace mlsos;
using linalg::Matrix;
using linalg::Vector;
using mlp::MultilinearProgram;

TEST_SUITE_BEGIN("hierarchy");

namespace {

MultilinearProgram xy_program() {
    MultilinearProgram p;
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

MultilinearProgram pennies_program() {
    apps::BimatrixGame g;
    Matrix A(2, 2), B(2, 2);
    A << 1, -1, -1, 1;
    B = -A;
    g = apps::shift_positive(A, B);
    return apps::game_to_mlp(g);
}

}  // namespace

TEST_CASE("compile sizes for max xy over the unit square at t=2") {
    MultilinearProgram p = xy_program();
    p.prepare();
    auto co = hierarchy::compile(p, 2);
    REQUIRE(co.sdp.psd_block_sizes.size() == 5);
    CHECK(co.sdp.psd_block_sizes[0] == 6);
    for (int b = 1; b < 5; ++b) CHECK(co.sdp.psd_block_sizes[b] == 3);
    CHECK(co.sdp.num_constraints() == 15);
    CHECK(co.sdp.free_count == 1);
}

TEST_CASE("compile sizes for the shifted matching-pennies program at t=2") {
    MultilinearProgram p = pennies_program();
    p.prepare();
    auto co = hierarchy::compile(p, 2);
    REQUIRE(co.sdp.psd_block_sizes.size() == 9);
    CHECK(co.sdp.psd_block_sizes[0] == 15);
    for (int b = 1; b < 9; ++b) CHECK(co.sdp.psd_block_sizes[b] == 5);
    CHECK(co.sdp.num_constraints() == 70);
    CHECK(co.sdp.free_count == 1);
}

TEST_CASE("order below the objective degree is rejected") {
    MultilinearProgram p = xy_program();
    p.prepare();
    CHECK_THROWS_AS(hierarchy::compile(p, 1), OrderTooSmall);
}

TEST_CASE("solve_order on max xy at t=2") {
    MultilinearProgram p = xy_program();
    p.prepare();
    auto r = hierarchy::solve_order(p, 2);
    CHECK(r.sdp_status == sdp::SdpStatus::Optimal);
    CHECK(r.f_t == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.usable);
    CHECK(r.cert_report.passed);

    // normalization and first-order moments
    const auto one = poly::Monomial::one(2);
    REQUIRE(r.moments.count(one) == 1);
    CHECK(r.moments.at(one) == doctest::Approx(1.0).epsilon(1e-6));
    REQUIRE(r.candidate.has_value());
    CHECK((*r.candidate)[0](0) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK((*r.candidate)[1](0) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("verify_certificate accepts the exact hand-built identity for 1 - xy") {
    MultilinearProgram p = xy_program();
    p.prepare();

    // 1 - xy = 1/2 (x-y)^2 + 1/2 (1+x^2)(1-x) + 1/2 (1-x)^2 x
    //        + 1/2 (1+y^2)(1-y) + 1/2 (1-y)^2 y
    // over sigma0 basis [1, y, x, y^2, xy, x^2] and multiplier basis [1, y, x].
    hierarchy::TruncatedCertificate cert;
    cert.t = 2;
    cert.mu = 1.0;
    cert.gram0 = Matrix::Zero(6, 6);
    cert.gram0(1, 1) = 0.5;
    cert.gram0(1, 2) = cert.gram0(2, 1) = -0.5;
    cert.gram0(2, 2) = 0.5;

    Matrix s_one_minus_x = Matrix::Zero(3, 3);   // 1/2 (1 + x^2)
    s_one_minus_x(0, 0) = 0.5;
    s_one_minus_x(2, 2) = 0.5;
    Matrix s_x = Matrix::Zero(3, 3);             // 1/2 (1 - x)^2
    s_x(0, 0) = 0.5;
    s_x(0, 2) = s_x(2, 0) = -0.5;
    s_x(2, 2) = 0.5;
    Matrix s_one_minus_y = Matrix::Zero(3, 3);   // 1/2 (1 + y^2)
    s_one_minus_y(0, 0) = 0.5;
    s_one_minus_y(1, 1) = 0.5;
    Matrix s_y = Matrix::Zero(3, 3);             // 1/2 (1 - y)^2
    s_y(0, 0) = 0.5;
    s_y(0, 1) = s_y(1, 0) = -0.5;
    s_y(1, 1) = 0.5;

    // block 0 rows: x <= 1 (gen 1-x), -x <= 0 (gen x); block 1 likewise for y
    cert.gram_ineq = {s_one_minus_x, s_x, s_one_minus_y, s_y};

    auto rep = hierarchy::verify_certificate(p, cert);
    CHECK(rep.max_residual <= 1e-14);
    CHECK(rep.min_gram_eigenvalue >= -1e-14);
    CHECK(rep.passed);

    SUBCASE("a wrong constant is caught at the constant monomial") {
        cert.mu = 0.9;
        auto bad = hierarchy::verify_certificate(p, cert);
        CHECK(bad.max_residual == doctest::Approx(0.1));
        CHECK_FALSE(bad.passed);
    }

    SUBCASE("an indefinite Gram block is caught") {
        cert.gram_ineq[1] -= 1e-3 * Matrix::Identity(3, 3);
        auto bad = hierarchy::verify_certificate(p, cert);
        CHECK(bad.min_gram_eigenvalue == doctest::Approx(-1e-3).epsilon(1e-6));
        CHECK_FALSE(bad.passed);
    }

    SUBCASE("dimension mismatches are rejected") {
        cert.gram_ineq.pop_back();
        CHECK_THROWS_AS(hierarchy::verify_certificate(p, cert), DimensionMismatch);
    }
}

TEST_CASE("run on max xy converges at t=2 with a tiny gap") {
    MultilinearProgram p = xy_program();
    p.prepare();
    auto rep = hierarchy::run(p);
    CHECK(rep.status == hierarchy::RunStatus::ConvergedCertified);
    REQUIRE(rep.orders.size() == 1);
    CHECK(rep.orders[0].t == 2);
    CHECK(rep.best_upper == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(rep.best_lower == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(rep.gap) <= 1e-8);
}

TEST_CASE("run on the shifted matching-pennies program certifies value 0") {
    MultilinearProgram p = pennies_program();
    p.prepare();
    auto rep = hierarchy::run(p);
    CHECK(rep.status == hierarchy::RunStatus::ConvergedCertified);
    CHECK(std::abs(rep.best_upper) <= 1e-5);
    CHECK(std::abs(rep.best_lower) <= 1e-9);
}

TEST_CASE("order cap semantics") {
    MultilinearProgram p = xy_program();
    p.prepare();
    hierarchy::RunOptions opts;
    opts.t_max = 2;
    opts.tol = 1e-18;  // unreachable: force the cap path
    auto rep = hierarchy::run(p, opts);
    CHECK(rep.status == hierarchy::RunStatus::OrderCapReached);
    CHECK(rep.orders.size() == 1);
    CHECK(std::isfinite(rep.gap));
}

TEST_CASE("literal sigma0 truncation also certifies max xy") {
    MultilinearProgram p = xy_program();
    p.prepare();
    hierarchy::RunOptions opts;
    opts.sigma0 = hierarchy::Sigma0Mode::Deg2tMinus2;
    auto co = hierarchy::compile(p, 2, opts.sigma0);
    CHECK(co.sdp.psd_block_sizes[0] == 3);       // basis(2,1)
    CHECK(co.sdp.num_constraints() == 10);       // degree-4 rows vanish
    auto r = hierarchy::solve_order(p, 2, opts);
    CHECK(r.f_t == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.usable);
}

TEST_CASE("upper bounds are monotone and sound on random bilinear instances") {
    randgen::Rng rng(2024);
    for (int rep = 0; rep < 4; ++rep) {
        MultilinearProgram p = randgen::random_program(rng, {2, 2}, 2);
        p.prepare();
        auto orc = mlp::vertex_oracle(p);
        hierarchy::RunOptions opts;
        opts.t_max = 3;
        opts.tol = 1e-18;  // solve both orders
        auto hrep = hierarchy::run(p, opts);
        double prev = std::numeric_limits<double>::infinity();
        for (const auto& r : hrep.orders) {
            if (!r.usable) continue;
            CHECK(r.f_t >= orc.value - 1e-6 * (1.0 + std::abs(orc.value)));
            CHECK(r.f_t <= prev + 1e-7 * (1.0 + std::abs(prev)));
            prev = r.f_t;
        }
    }
}

TEST_CASE("redundant facets do not move the relaxation value") {
    MultilinearProgram p1 = xy_program();
    MultilinearProgram p2 = xy_program();
    // add x1 <= 2 to the first block of p2
    auto& blk = p2.blocks[0];
    blk.A.conservativeResize(3, 1);
    blk.a.conservativeResize(3);
    blk.A(2, 0) = 1.0;
    blk.a(2) = 2.0;
    p1.prepare(/*strip_redundant=*/false);
    p2.prepare(/*strip_redundant=*/false);
    auto r1 = hierarchy::solve_order(p1, 2);
    auto r2 = hierarchy::solve_order(p2, 2);
    REQUIRE(r1.usable);
    REQUIRE(r2.usable);
    CHECK(std::abs(r1.f_t - r2.f_t) <= 1e-6);
}

TEST_SUITE_END();
