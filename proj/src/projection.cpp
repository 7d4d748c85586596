#include "ttsa/projection.hpp"

namespace ttsa {

Subspace::Subspace(const Matrix& spanning) : u_(qr_orthonormalize(spanning)) {
    projector_ = u_ * u_.transpose();
}

Subspace Subspace::full(Index dim) {
    return Subspace(Matrix::Identity(dim, dim));
}

Vector Subspace::project(const Vector& v) const {
    if (v.size() != ambient_dim()) {
        throw DimensionMismatch("project: vector dim does not match ambient dim");
    }
    return projector_ * v;
}

Vector projected_linear_solve(const Subspace& sub, const Matrix& a,
                              const Vector& b) {
    if (a.rows() != sub.ambient_dim() || a.cols() != sub.ambient_dim() ||
        b.size() != sub.ambient_dim()) {
        throw DimensionMismatch("projected_linear_solve: dims do not match");
    }
    const Matrix& u = sub.basis();
    const Matrix reduced = u.transpose() * a * u;
    const double smin = min_singular_value(reduced);
    const double smax = operator_norm(reduced);
    if (smax == 0.0 || smin < kSingularRelTol * smax) {
        throw ProjectedSingular("projected_linear_solve: U' A U is singular");
    }
    return sub.lift(solve_linear(reduced, sub.reduce(b)));
}

Vector x_p_of_y(const TwoTimeScaleSystem& sys, const Subspace& sub_x,
                const Vector& y) {
    return projected_linear_solve(sub_x, sys.a_ff, sys.b1 - sys.a_fs * y);
}

ConstrainedSolution constrained_solution(const TwoTimeScaleSystem& sys,
                                         const Subspace& sub_x,
                                         const Subspace& sub_y) {
    const Matrix& ux = sub_x.basis();
    const Matrix& uy = sub_y.basis();
    const Index d = sub_x.rank();
    const Index r = sub_y.rank();

    Matrix reduced(d + r, d + r);
    reduced.topLeftCorner(d, d) = ux.transpose() * sys.a_ff * ux;
    reduced.topRightCorner(d, r) = ux.transpose() * sys.a_fs * uy;
    reduced.bottomLeftCorner(r, d) = uy.transpose() * sys.a_sf * ux;
    reduced.bottomRightCorner(r, r) = uy.transpose() * sys.a_ss * uy;
    Vector rhs(d + r);
    rhs.head(d) = sub_x.reduce(sys.b1);
    rhs.tail(r) = sub_y.reduce(sys.b2);

    const double smin = min_singular_value(reduced);
    const double smax = operator_norm(reduced);
    if (smax == 0.0 || smin < kSingularRelTol * smax) {
        throw ProjectedSingular("constrained_solution: reduced block matrix is singular");
    }

    ConstrainedSolution sol;
    const Vector z = solve_linear(reduced, rhs);
    sol.x_reduced = z.head(d);
    sol.y_reduced = z.tail(r);
    sol.x_p = sub_x.lift(sol.x_reduced);
    sol.y_p = sub_y.lift(sol.y_reduced);
    const auto [g, h] = drift(sys, sol.x_p, sol.y_p);
    sol.residual_fast = sub_x.project(g).norm();
    sol.residual_slow = sub_y.project(h).norm();
    return sol;
}

std::pair<double, double> approximation_errors(const SolutionPair& sol,
                                               const Subspace& sub_x,
                                               const Subspace& sub_y) {
    const Vector rx = sol.x_star - sub_x.project(sol.x_star);
    const Vector ry = sol.y_star - sub_y.project(sol.y_star);
    return {rx.squaredNorm(), ry.squaredNorm()};
}

}  // namespace ttsa
