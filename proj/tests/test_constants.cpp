#include <doctest.h>

#include "ttsa/constants.hpp"
#include "ttsa/simulate.hpp"
#include "ttsa/synthetic.hpp"

#include <array>
#include <cmath>

using namespace ttsa;

namespace {

Matrix random_matrix(RngStream& rng, Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) m(i, j) = rng.gaussian();
    }
    return m;
}

TwoTimeScaleSystem decoupled(Index n, Index m, double fast_rate, double slow_rate) {
    TwoTimeScaleSystem sys;
    sys.a_ff = -fast_rate * Matrix::Identity(n, n);
    sys.a_fs = Matrix::Zero(n, m);
    sys.a_sf = Matrix::Zero(m, n);
    sys.a_ss = -slow_rate * Matrix::Identity(m, m);
    sys.b1 = Vector::Zero(n);
    sys.b2 = Vector::Zero(m);
    return sys;
}

}  // namespace

TEST_CASE("resolvent constants for a negated-identity fast block") {
    const TwoTimeScaleSystem sys = decoupled(4, 3, 1.0, 1.0);
    RngStream rng(2);
    const Subspace sub_x(random_matrix(rng, 4, 2));
    const Subspace sub_y(random_matrix(rng, 3, 2));
    const ResolventConstants rc = resolvent_constants(sys, sub_x, sub_y);

    // c1 = U (U'(-I)U)^{-1} U' = -Pi, m_x = 1, mu_x = sigma_min(U'(2I)U) = 2.
    CHECK((rc.c1 + sub_x.projector()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(rc.m_x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rc.mu_x == doctest::Approx(2.0).epsilon(1e-12));
    // With zero couplings both resolvents are the identity.
    CHECK(rc.kappa_xy == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rc.kappa_yx == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("resolvent constants are invariant to re-orthonormalizing the bases") {
    SyntheticConfig cfg;  // benchmark dims
    const SyntheticInstance inst = generate(cfg);
    const ResolventConstants a =
        resolvent_constants(inst.system, inst.sub_x, inst.sub_y);

    RngStream rng(77);
    const Matrix mix_x = random_matrix(rng, inst.sub_x.rank(), inst.sub_x.rank()) +
                         3.0 * Matrix::Identity(inst.sub_x.rank(), inst.sub_x.rank());
    const Matrix mix_y = random_matrix(rng, inst.sub_y.rank(), inst.sub_y.rank()) +
                         3.0 * Matrix::Identity(inst.sub_y.rank(), inst.sub_y.rank());
    const Subspace sub_x2(Matrix(inst.sub_x.basis() * mix_x));
    const Subspace sub_y2(Matrix(inst.sub_y.basis() * mix_y));
    const ResolventConstants b = resolvent_constants(inst.system, sub_x2, sub_y2);

    CHECK(a.m_x == doctest::Approx(b.m_x).epsilon(1e-10));
    CHECK(a.m_y == doctest::Approx(b.m_y).epsilon(1e-10));
    CHECK(a.mu_x == doctest::Approx(b.mu_x).epsilon(1e-10));
    CHECK(a.mu_y == doctest::Approx(b.mu_y).epsilon(1e-10));
    CHECK(a.kappa_xy == doctest::Approx(b.kappa_xy).epsilon(1e-10));
    CHECK(a.kappa_yx == doctest::Approx(b.kappa_yx).epsilon(1e-10));
    CHECK((a.c1 - b.c1).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((a.c3 - b.c3).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((a.c4 - b.c4).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("resolvent constants name the singular reduced matrix") {
    TwoTimeScaleSystem sys = decoupled(3, 2, 1.0, 1.0);
    sys.a_ff.setZero();  // U' A_ff U singular
    try {
        (void)resolvent_constants(sys, Subspace::full(3), Subspace::full(2));
        FAIL("expected ProjectedSingular");
    } catch (const ProjectedSingular& e) {
        CHECK(std::string(e.what()).find("A_ff") != std::string::npos);
    }
}

TEST_CASE("full-subspace limit recovers the ambient operators") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        SyntheticConfig cfg;
        cfg.n = 5 + static_cast<Index>(seed % 6);
        cfg.m = 4 + static_cast<Index>(seed % 5);
        cfg.r = 2;
        cfg.seed = 900 + seed;
        const SyntheticInstance inst = generate(cfg);
        const Subspace fx = Subspace::full(cfg.n);
        const Subspace fy = Subspace::full(cfg.m);
        const ResolventConstants rc = resolvent_constants(inst.system, fx, fy);

        const Matrix aff_inv = solve_linear(
            inst.system.a_ff, Matrix(Matrix::Identity(cfg.n, cfg.n)));
        CHECK((rc.c1 - aff_inv).cwiseAbs().maxCoeff() < 1e-10);

        // Sign-corrected slow operator degenerates to the Schur complement.
        const Matrix slow_op =
            inst.system.a_ss - inst.system.a_sf * rc.c1 * inst.system.a_fs;
        CHECK((slow_op - schur_complement(inst.system)).cwiseAbs().maxCoeff() < 1e-10);

        // Bounds reduce to the statistical term alone when eps = 0.
        const TheoremConstants tc = theorem_constants(rc, inst.system, 0.128, 0.1024);
        const std::array<long, 3> ts{1, 10, 1000};
        const auto curve = bound_curve(tc, 0.0, 0.0, ts);
        for (const BoundPoint& p : curve) {
            CHECK(p.bound_x ==
                  doctest::Approx(2.0 * tc.l_x / static_cast<double>(p.t)).epsilon(1e-14));
            CHECK(p.bound_y ==
                  doctest::Approx(2.0 * tc.l_y / static_cast<double>(p.t)).epsilon(1e-14));
        }
    }
}

TEST_CASE("theorem constants on decoupled unit-margin systems") {
    // Margins m_x = m_y = 1 with unit noise bounds give L_y = 2, L_x = 1.
    const TwoTimeScaleSystem sys = decoupled(3, 2, 1.0, 1.0);
    const Subspace fx = Subspace::full(3);
    const Subspace fy = Subspace::full(2);
    ResolventConstants rc = resolvent_constants(sys, fx, fy);
    CHECK(rc.m_x == doctest::Approx(1.0));
    CHECK(rc.m_y == doctest::Approx(1.0));
    const TheoremConstants tc = theorem_constants(rc, sys, 1.0, 1.0);
    CHECK(tc.l_y == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(tc.l_x == doctest::Approx(1.0).epsilon(1e-12));

    // B_xx = 2 kappa^2 (1 + |A_ff|/mu_x)^2 = 2 (1 + 1/2)^2 = 4.5.
    CHECK(tc.b_xx == doctest::Approx(4.5).epsilon(1e-12));

    // Zero noise bounds kill the statistical constants entirely.
    const TheoremConstants quiet = theorem_constants(rc, sys, 0.0, 0.0);
    CHECK(quiet.l_x == 0.0);
    CHECK(quiet.l_y == 0.0);
}

TEST_CASE("theorem constants are monotone in the noise bounds") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        SyntheticConfig cfg;
        cfg.n = 6;
        cfg.m = 5;
        cfg.r = 3;
        cfg.seed = 1300 + seed;
        const SyntheticInstance inst = generate(cfg);
        const ResolventConstants rc =
            resolvent_constants(inst.system, inst.sub_x, inst.sub_y);
        const TheoremConstants lo = theorem_constants(rc, inst.system, 0.1, 0.2);
        const TheoremConstants hi = theorem_constants(rc, inst.system, 0.3, 0.5);
        CHECK(hi.l_x >= lo.l_x);
        CHECK(hi.l_y >= lo.l_y);
        CHECK(hi.b_xx == lo.b_xx);  // approximation constants ignore the noise
        CHECK(hi.b_yy == lo.b_yy);
    }
}

TEST_CASE("approximation part of the bound holds on checker-passing instances") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        SyntheticConfig cfg;
        cfg.seed = 2000 + seed;
        const SyntheticInstance inst = generate(cfg);
        const ResolventConstants rc =
            resolvent_constants(inst.system, inst.sub_x, inst.sub_y);
        const TheoremConstants tc = theorem_constants(rc, inst.system, 0.128, 0.1024);
        const ConstrainedSolution sol =
            constrained_solution(inst.system, inst.sub_x, inst.sub_y);
        const auto [ex, ey] =
            approximation_errors(inst.solution, inst.sub_x, inst.sub_y);
        const double lhs_x = (sol.x_p - inst.solution.x_star).squaredNorm();
        const double lhs_y = (sol.y_p - inst.solution.y_star).squaredNorm();
        CHECK(lhs_x <= tc.b_xx * ex + tc.b_xy * ey);
        CHECK(lhs_y <= tc.b_yx * ex + tc.b_yy * ey);
    }
}

TEST_CASE("bound_curve algebra") {
    TheoremConstants tc;
    tc.l_x = 3.0;
    tc.l_y = 5.0;
    tc.b_xx = 1.0;
    tc.b_xy = 0.5;
    tc.b_yx = 0.25;
    tc.b_yy = 2.0;

    // L = 0 gives a constant curve at the approximation floor.
    TheoremConstants flat = tc;
    flat.l_x = flat.l_y = 0.0;
    const std::array<long, 3> ts{1, 7, 5000};
    const auto floor_curve = bound_curve(flat, 0.3, 0.7, ts);
    for (const auto& p : floor_curve) {
        CHECK(p.bound_x == doctest::Approx(2.0 * (1.0 * 0.3 + 0.5 * 0.7)));
        CHECK(p.bound_y == doctest::Approx(2.0 * (0.25 * 0.3 + 2.0 * 0.7)));
    }

    // Doubling T halves the distance to the floor exactly.
    const std::array<long, 2> pair{100, 200};
    const auto curve = bound_curve(tc, 0.3, 0.7, pair);
    const double floor_x = 2.0 * (1.0 * 0.3 + 0.5 * 0.7);
    CHECK(curve[0].bound_x - floor_x ==
          doctest::Approx(2.0 * (curve[1].bound_x - floor_x)).epsilon(1e-14));

    CHECK_THROWS_AS((void)bound_curve(tc, 0.0, 0.0, std::array<long, 1>{0}),
                    std::invalid_argument);
}

TEST_CASE("theorem_constants rejects nonpositive margins") {
    const TwoTimeScaleSystem sys = decoupled(2, 2, 1.0, 1.0);
    ResolventConstants rc =
        resolvent_constants(sys, Subspace::full(2), Subspace::full(2));
    rc.m_y = 0.0;
    CHECK_THROWS_AS((void)theorem_constants(rc, sys, 1.0, 1.0), std::invalid_argument);
}
