#include "ttsa/system.hpp"

#include "ttsa/projection.hpp"

#include <cmath>

namespace ttsa {

void TwoTimeScaleSystem::validate() const {
    const Index n = a_ff.rows();
    const Index m = a_ss.rows();
    if (a_ff.cols() != n || a_ss.cols() != m) {
        throw DimensionMismatch("system: self-dynamics blocks must be square");
    }
    if (a_fs.rows() != n || a_fs.cols() != m) {
        throw DimensionMismatch("system: A_fs must be n x m");
    }
    if (a_sf.rows() != m || a_sf.cols() != n) {
        throw DimensionMismatch("system: A_sf must be m x n");
    }
    if (b1.size() != n || b2.size() != m) {
        throw DimensionMismatch("system: offset vectors must match block dims");
    }
    if (!a_ff.allFinite() || !a_fs.allFinite() || !a_sf.allFinite() ||
        !a_ss.allFinite() || !b1.allFinite() || !b2.allFinite()) {
        throw NumericError("system: non-finite entries");
    }
}

std::pair<Vector, Vector> drift(const TwoTimeScaleSystem& sys, const Vector& x,
                                const Vector& y) {
    if (x.size() != sys.fast_dim() || y.size() != sys.slow_dim()) {
        throw DimensionMismatch("drift: point dims do not match the system");
    }
    Vector g = sys.a_ff * x + sys.a_fs * y - sys.b1;
    Vector h = sys.a_sf * x + sys.a_ss * y - sys.b2;
    return {std::move(g), std::move(h)};
}

SolutionPair unconstrained_solution(const TwoTimeScaleSystem& sys) {
    const Index n = sys.fast_dim();
    const Index m = sys.slow_dim();
    Matrix block(n + m, n + m);
    block.topLeftCorner(n, n) = sys.a_ff;
    block.topRightCorner(n, m) = sys.a_fs;
    block.bottomLeftCorner(m, n) = sys.a_sf;
    block.bottomRightCorner(m, m) = sys.a_ss;
    Vector rhs(n + m);
    rhs.head(n) = sys.b1;
    rhs.tail(m) = sys.b2;
    const Vector z = solve_linear(block, rhs);
    return SolutionPair{z.head(n), z.tail(m)};
}

Matrix schur_complement(const TwoTimeScaleSystem& sys) {
    const Matrix aff_inv_afs = solve_linear(sys.a_ff, sys.a_fs);
    return sys.a_ss - sys.a_sf * aff_inv_afs;
}

bool AssumptionReport::matrix_assumptions_pass() const {
    return a1_aff_hurwitz.pass && a1_schur_hurwitz.pass && a2_fast_hurwitz.pass &&
           a2_slow_hurwitz.pass && a3_mu_y_positive.pass && a3_resolvent_xy.pass &&
           a3_resolvent_yx.pass;
}

namespace {

Verdict hurwitz_verdict(const Matrix& m) {
    const double abscissa = spectral_abscissa(m);
    return Verdict{abscissa < kHurwitzMargin, abscissa};
}

Verdict invertibility_verdict(const Matrix& m) {
    const double smin = min_singular_value(m);
    const double smax = operator_norm(m);
    const double rel = smax > 0.0 ? smin / smax : 0.0;
    return Verdict{rel > kSingularRelTol, rel};
}

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

AssumptionReport check_assumptions(const TwoTimeScaleSystem& sys,
                                   const Subspace& sub_x, const Subspace& sub_y,
                                   double alpha, double beta) {
    AssumptionReport rep;
    const Index n = sys.fast_dim();
    const Index m = sys.slow_dim();
    const Matrix& ux = sub_x.basis();
    const Matrix& uy = sub_y.basis();

    rep.a1_aff_hurwitz = hurwitz_verdict(sys.a_ff);
    try {
        rep.a1_schur_hurwitz = hurwitz_verdict(schur_complement(sys));
    } catch (const NumericError&) {
        rep.a1_schur_hurwitz = Verdict{false, kNan};
    }

    const Matrix fast_reduced = ux.transpose() * sys.a_ff * ux;
    rep.a2_fast_hurwitz = hurwitz_verdict(fast_reduced);

    // The slow operator needs c1 = U_x (U_x' A_ff U_x)^{-1} U_x'; if the fast
    // reduced matrix is singular every dependent verdict degrades to a fail.
    try {
        const Matrix c1 =
            ux * solve_linear(fast_reduced, Matrix(ux.transpose()));
        const Matrix coupling = sys.a_sf * c1 * sys.a_fs;
        rep.a2_slow_hurwitz =
            hurwitz_verdict(uy.transpose() * (sys.a_ss - coupling) * uy);
        rep.a2_slow_plus_variant =
            hurwitz_verdict(uy.transpose() * (sys.a_ss + coupling) * uy);
    } catch (const NumericError&) {
        rep.a2_slow_hurwitz = Verdict{false, kNan};
        rep.a2_slow_plus_variant = Verdict{false, kNan};
    }

    const Matrix mu_y_mat = uy.transpose() * (Matrix::Identity(m, m) - sys.a_ss) * uy;
    {
        const Verdict inv = invertibility_verdict(mu_y_mat);
        rep.a3_mu_y_positive = Verdict{inv.pass, min_singular_value(mu_y_mat)};
    }

    try {
        const Matrix mu_x_mat =
            ux.transpose() * (Matrix::Identity(n, n) - sys.a_ff) * ux;
        const Matrix c3 = ux * solve_linear(mu_x_mat, Matrix(ux.transpose()));
        const Matrix c4 = uy * solve_linear(mu_y_mat, Matrix(uy.transpose()));
        rep.a3_resolvent_xy = invertibility_verdict(
            Matrix::Identity(n, n) - c3 * sys.a_fs * c4 * sys.a_sf);
        rep.a3_resolvent_yx = invertibility_verdict(
            Matrix::Identity(m, m) - c4 * sys.a_sf * c3 * sys.a_fs);
    } catch (const NumericError&) {
        rep.a3_resolvent_xy = Verdict{false, kNan};
        rep.a3_resolvent_yx = Verdict{false, kNan};
    }

    const double aff_norm = operator_norm(sys.a_ff);
    const double ass_norm = operator_norm(sys.a_ss);
    rep.step_alpha = Verdict{alpha * aff_norm < 1.0, alpha * aff_norm};
    // |A_ss|_2 = 0 makes the beta condition vacuously true.
    rep.step_beta = Verdict{ass_norm == 0.0 || beta * ass_norm < 1.0, beta * ass_norm};
    rep.step_ratio = Verdict{beta > 0.0 && alpha > 0.0 && beta / alpha <= 0.1,
                             alpha > 0.0 ? beta / alpha : kNan};
    return rep;
}

}  // namespace ttsa
