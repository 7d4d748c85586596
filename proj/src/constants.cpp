#include "ttsa/constants.hpp"

#include <stdexcept>

namespace ttsa {

namespace {

// U (reduced)^{-1} U' with an invertibility gate; `name` identifies the
// reduced matrix in the ProjectedSingular message.
Matrix lifted_inverse(const Matrix& u, const Matrix& reduced, const char* name) {
    const double smin = min_singular_value(reduced);
    const double smax = operator_norm(reduced);
    if (smax == 0.0 || smin < kSingularRelTol * smax) {
        throw ProjectedSingular(std::string("resolvent_constants: singular reduced matrix ") + name);
    }
    return u * solve_linear(reduced, Matrix(u.transpose()));
}

Matrix ambient_inverse(const Matrix& m, const char* name) {
    const double smin = min_singular_value(m);
    const double smax = operator_norm(m);
    if (smax == 0.0 || smin < kSingularRelTol * smax) {
        throw ProjectedSingular(std::string("resolvent_constants: singular resolvent ") + name);
    }
    return solve_linear(m, Matrix(Matrix::Identity(m.rows(), m.cols())));
}

}  // namespace

ResolventConstants resolvent_constants(const TwoTimeScaleSystem& sys,
                                       const Subspace& sub_x,
                                       const Subspace& sub_y) {
    const Index n = sys.fast_dim();
    const Index m = sys.slow_dim();
    const Matrix& ux = sub_x.basis();
    const Matrix& uy = sub_y.basis();

    ResolventConstants rc;

    const Matrix fast_reduced = ux.transpose() * sys.a_ff * ux;
    rc.m_x = min_singular_value(fast_reduced);
    rc.c1 = lifted_inverse(ux, fast_reduced, "U_x' A_ff U_x");

    const Matrix slow_op = sys.a_ss - sys.a_sf * rc.c1 * sys.a_fs;
    const Matrix slow_reduced = uy.transpose() * slow_op * uy;
    rc.m_y = min_singular_value(slow_reduced);
    rc.c2 = lifted_inverse(uy, slow_reduced, "U_y' (A_ss - A_sf c1 A_fs) U_y");

    const Matrix mu_x_mat = ux.transpose() * (Matrix::Identity(n, n) - sys.a_ff) * ux;
    rc.mu_x = min_singular_value(mu_x_mat);
    rc.c3 = lifted_inverse(ux, mu_x_mat, "U_x' (I - A_ff) U_x");

    const Matrix mu_y_mat = uy.transpose() * (Matrix::Identity(m, m) - sys.a_ss) * uy;
    rc.mu_y = min_singular_value(mu_y_mat);
    rc.c4 = lifted_inverse(uy, mu_y_mat, "U_y' (I - A_ss) U_y");

    rc.kappa_xy = operator_norm(ambient_inverse(
        Matrix::Identity(n, n) - rc.c3 * sys.a_fs * rc.c4 * sys.a_sf,
        "I - c3 A_fs c4 A_sf"));
    rc.kappa_yx = operator_norm(ambient_inverse(
        Matrix::Identity(m, m) - rc.c4 * sys.a_sf * rc.c3 * sys.a_fs,
        "I - c4 A_sf c3 A_fs"));
    return rc;
}

TheoremConstants theorem_constants(const ResolventConstants& rc,
                                   const TwoTimeScaleSystem& sys, double c_eps,
                                   double c_psi) {
    if (rc.m_x <= 0.0 || rc.m_y <= 0.0 || rc.mu_x <= 0.0 || rc.mu_y <= 0.0) {
        throw std::invalid_argument("theorem_constants: margins must be positive");
    }
    if (c_eps < 0.0 || c_psi < 0.0) {
        throw std::invalid_argument("theorem_constants: noise bounds must be >= 0");
    }
    const double aff = operator_norm(sys.a_ff);
    const double ass = operator_norm(sys.a_ss);
    const double afs = operator_norm(sys.a_fs);
    const double asf = operator_norm(sys.a_sf);
    const double mx2 = rc.m_x * rc.m_x;
    const double my2 = rc.m_y * rc.m_y;

    TheoremConstants tc;
    tc.c_eps = c_eps;
    tc.c_psi = c_psi;
    tc.l_y = 2.0 * c_psi / my2 + 2.0 * asf * asf / (my2 * mx2) * c_eps;
    tc.l_x = 2.0 * afs * afs / (mx2 * my2) * c_psi +
             (4.0 * afs * afs * asf * asf / (my2 * mx2 * mx2) + 1.0 / mx2) * c_eps;

    const double fast_gain = 1.0 + aff / rc.mu_x;
    const double slow_gain = 1.0 + ass / rc.mu_y;
    tc.b_xx = 2.0 * rc.kappa_xy * rc.kappa_xy * fast_gain * fast_gain;
    tc.b_xy = 2.0 * rc.kappa_xy * rc.kappa_xy * (afs / rc.mu_x) * (afs / rc.mu_x) *
              slow_gain * slow_gain;
    tc.b_yy = 2.0 * rc.kappa_yx * rc.kappa_yx * slow_gain * slow_gain;
    tc.b_yx = 2.0 * rc.kappa_yx * rc.kappa_yx * (asf / rc.mu_y) * (asf / rc.mu_y) *
              fast_gain * fast_gain;
    return tc;
}

std::vector<BoundPoint> bound_curve(const TheoremConstants& tc, double eps_x_sq,
                                    double eps_y_sq, std::span<const long> ts) {
    std::vector<BoundPoint> out;
    out.reserve(ts.size());
    const double floor_x = 2.0 * tc.b_xx * eps_x_sq + 2.0 * tc.b_xy * eps_y_sq;
    const double floor_y = 2.0 * tc.b_yx * eps_x_sq + 2.0 * tc.b_yy * eps_y_sq;
    for (long t : ts) {
        if (t < 1) throw std::invalid_argument("bound_curve: t must be >= 1");
        out.push_back({t, floor_x + 2.0 * tc.l_x / static_cast<double>(t),
                       floor_y + 2.0 * tc.l_y / static_cast<double>(t)});
    }
    return out;
}

}  // namespace ttsa
