#include <doctest.h>

#include "ttsa/projection.hpp"
#include "ttsa/simulate.hpp"
#include "ttsa/synthetic.hpp"
#include "ttsa/system.hpp"


using namespace ttsa;

namespace {

// Decoupled diagonal system with solution x* = (1, 2), y* = (3).
TwoTimeScaleSystem decoupled_example() {
    TwoTimeScaleSystem sys;
    sys.a_ff = -2.0 * Matrix::Identity(2, 2);
    sys.a_fs = Matrix::Zero(2, 1);
    sys.a_sf = Matrix::Zero(1, 2);
    sys.a_ss = -Matrix::Identity(1, 1);
    sys.b1 = Vector(2);
    sys.b1 << -2, -4;
    sys.b2 = Vector(1);
    sys.b2 << -3;
    return sys;
}

}  // namespace

TEST_CASE("drift vanishes at the decoupled solution point") {
    const TwoTimeScaleSystem sys = decoupled_example();
    Vector x(2), y(1);
    x << 1, 2;
    y << 3;
    const auto [g, h] = drift(sys, x, y);
    CHECK(g.norm() < 1e-14);
    CHECK(h.norm() < 1e-14);
}

TEST_CASE("drift at the origin returns the negated offsets") {
    const TwoTimeScaleSystem sys = decoupled_example();
    const auto [g, h] = drift(sys, Vector::Zero(2), Vector::Zero(1));
    CHECK((g + sys.b1).norm() == 0.0);
    CHECK((h + sys.b2).norm() == 0.0);
}

TEST_CASE("drift matches an independent re-evaluation on a seeded system") {
    RngStream rng(11);
    TwoTimeScaleSystem sys;
    sys.a_ff = Matrix(3, 3);
    sys.a_fs = Matrix(3, 2);
    sys.a_sf = Matrix(2, 3);
    sys.a_ss = Matrix(2, 2);
    sys.b1 = Vector(3);
    sys.b2 = Vector(2);
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 3; ++j) sys.a_ff(i, j) = rng.gaussian();
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 2; ++j) sys.a_fs(i, j) = rng.gaussian();
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 3; ++j) sys.a_sf(i, j) = rng.gaussian();
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j) sys.a_ss(i, j) = rng.gaussian();
    for (Index i = 0; i < 3; ++i) sys.b1(i) = rng.gaussian();
    for (Index i = 0; i < 2; ++i) sys.b2(i) = rng.gaussian();

    Vector x(3), y(2);
    for (Index i = 0; i < 3; ++i) x(i) = rng.gaussian();
    for (Index i = 0; i < 2; ++i) y(i) = rng.gaussian();

    const auto [g, h] = drift(sys, x, y);
    // Plain per-entry loops, independent of Eigen's products.
    for (Index i = 0; i < 3; ++i) {
        double gi = -sys.b1(i);
        for (Index j = 0; j < 3; ++j) gi += sys.a_ff(i, j) * x(j);
        for (Index j = 0; j < 2; ++j) gi += sys.a_fs(i, j) * y(j);
        CHECK(g(i) == doctest::Approx(gi).epsilon(1e-14));
    }
    for (Index i = 0; i < 2; ++i) {
        double hi = -sys.b2(i);
        for (Index j = 0; j < 3; ++j) hi += sys.a_sf(i, j) * x(j);
        for (Index j = 0; j < 2; ++j) hi += sys.a_ss(i, j) * y(j);
        CHECK(h(i) == doctest::Approx(hi).epsilon(1e-14));
    }

    CHECK_THROWS_AS((void)drift(sys, Vector::Zero(2), y), DimensionMismatch);
}

TEST_CASE("unconstrained_solution solves the decoupled example") {
    const SolutionPair sol = unconstrained_solution(decoupled_example());
    CHECK(sol.x_star(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sol.x_star(1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(sol.y_star(0) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("unconstrained_solution residuals stay below tolerance on generated instances") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        SyntheticConfig cfg;
        cfg.n = 8;
        cfg.m = 6;
        cfg.r = 3;
        cfg.seed = seed;
        const SyntheticInstance inst = generate(cfg);
        const SolutionPair sol = unconstrained_solution(inst.system);
        const auto [g, h] = drift(inst.system, sol.x_star, sol.y_star);
        const double scale = inst.system.scale();
        CHECK(g.norm() <= 1e-9 * scale);
        CHECK(h.norm() <= 1e-9 * scale);
    }
}

TEST_CASE("unconstrained_solution rejects a singular block system") {
    TwoTimeScaleSystem sys = decoupled_example();
    sys.a_ff.setZero();
    sys.a_fs.setZero();
    CHECK_THROWS_AS((void)unconstrained_solution(sys), Singular);
}

TEST_CASE("schur_complement special cases") {
    TwoTimeScaleSystem sys = decoupled_example();
    CHECK((schur_complement(sys) - sys.a_ss).norm() == 0.0);

    RngStream rng(5);
    sys.a_ff = -Matrix::Identity(2, 2);
    sys.a_fs = Matrix(2, 1);
    sys.a_sf = Matrix(1, 2);
    sys.a_fs << rng.gaussian(), rng.gaussian();
    sys.a_sf << rng.gaussian(), rng.gaussian();
    // With A_ff = -I the complement is A_ss + A_sf A_fs.
    CHECK((schur_complement(sys) - (sys.a_ss + sys.a_sf * sys.a_fs)).norm() < 1e-14);

    sys.a_ff = Matrix::Zero(2, 2);
    CHECK_THROWS_AS((void)schur_complement(sys), Singular);
}

TEST_CASE("check_assumptions passes on the decoupled stable example") {
    const TwoTimeScaleSystem sys = decoupled_example();
    const AssumptionReport rep = check_assumptions(
        sys, Subspace::full(2), Subspace::full(1), 0.1, 0.01);
    CHECK(rep.all_pass());
    CHECK(rep.a1_aff_hurwitz.value == doctest::Approx(-2.0));
    CHECK(rep.a1_schur_hurwitz.value == doctest::Approx(-1.0));
    CHECK(rep.step_ratio.value == doctest::Approx(0.1));
}

TEST_CASE("check_assumptions fails a1 for an unstable fast block") {
    TwoTimeScaleSystem sys = decoupled_example();
    sys.a_ff = Matrix::Identity(2, 2);
    const AssumptionReport rep = check_assumptions(
        sys, Subspace::full(2), Subspace::full(1), 0.1, 0.01);
    CHECK_FALSE(rep.a1_aff_hurwitz.pass);
    CHECK(rep.a1_aff_hurwitz.value == doctest::Approx(1.0));
    CHECK_FALSE(rep.all_pass());
}

TEST_CASE("check_assumptions passes the benchmark instance with paper steps") {
    SyntheticConfig cfg;  // paper dims, default spectra
    const SyntheticInstance inst = generate(cfg);
    const AssumptionReport rep =
        check_assumptions(inst.system, inst.sub_x, inst.sub_y, 0.2, 0.01);
    CHECK(rep.all_pass());
    CHECK(rep.step_alpha.value < 1.0);
    CHECK(rep.step_ratio.value == doctest::Approx(0.05));
}

TEST_CASE("check_assumptions is deterministic") {
    SyntheticConfig cfg;
    cfg.n = 7;
    cfg.m = 5;
    cfg.r = 2;
    cfg.seed = 9;
    const SyntheticInstance inst = generate(cfg);
    const AssumptionReport a =
        check_assumptions(inst.system, inst.sub_x, inst.sub_y, 0.2, 0.01);
    const AssumptionReport b =
        check_assumptions(inst.system, inst.sub_x, inst.sub_y, 0.2, 0.01);
    auto same = [](const Verdict& u, const Verdict& v) {
        return u.pass == v.pass && u.value == v.value;
    };
    CHECK(same(a.a1_aff_hurwitz, b.a1_aff_hurwitz));
    CHECK(same(a.a1_schur_hurwitz, b.a1_schur_hurwitz));
    CHECK(same(a.a2_fast_hurwitz, b.a2_fast_hurwitz));
    CHECK(same(a.a2_slow_hurwitz, b.a2_slow_hurwitz));
    CHECK(same(a.a2_slow_plus_variant, b.a2_slow_plus_variant));
    CHECK(same(a.a3_mu_y_positive, b.a3_mu_y_positive));
    CHECK(same(a.a3_resolvent_xy, b.a3_resolvent_xy));
    CHECK(same(a.a3_resolvent_yx, b.a3_resolvent_yx));
    CHECK(same(a.step_alpha, b.step_alpha));
    CHECK(same(a.step_beta, b.step_beta));
    CHECK(same(a.step_ratio, b.step_ratio));
}

TEST_CASE("step size verdicts")
{
    const TwoTimeScaleSystem sys = decoupled_example();
    const Subspace fx = Subspace::full(2);
    const Subspace fy = Subspace::full(1);
    // alpha |A_ff| = 1.2 >= 1 fails.
    CHECK_FALSE(check_assumptions(sys, fx, fy, 0.6, 0.01).step_alpha.pass);
    // beta/alpha = 0.5 > 0.1 fails.
    CHECK_FALSE(check_assumptions(sys, fx, fy, 0.1, 0.05).step_ratio.pass);

    // |A_ss| = 0 makes the beta condition vacuous.
    TwoTimeScaleSystem flat = sys;
    flat.a_ss.setZero();
    flat.a_sf = Matrix::Ones(1, 2);  // keep the block system solvable
    const AssumptionReport rep = check_assumptions(flat, fx, fy, 0.1, 0.01);
    CHECK(rep.step_beta.pass);
    CHECK(rep.step_beta.value == 0.0);
}

TEST_CASE("system validation catches inconsistent blocks") {
    TwoTimeScaleSystem sys = decoupled_example();
    sys.a_fs = Matrix::Zero(1, 1);
    CHECK_THROWS_AS(sys.validate(), DimensionMismatch);
    sys = decoupled_example();
    sys.b1(0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(sys.validate(), NumericError);
}
