#pragma once

// Linear subspaces with cached orthogonal projectors, the projected linear
// solve (reduce to the subspace coordinates, solve, lift back), and the exact
// constrained solutions of the projected system.

#include "ttsa/numkit.hpp"
#include "ttsa/system.hpp"

#include <utility>

namespace ttsa {

/// A reduced matrix U' A U (or a resolvent built from one) is numerically
/// singular; carries the name of the offending matrix.
struct ProjectedSingular : NumericError {
    using NumericError::NumericError;
};

/// A linear subspace of R^ambient with an orthonormal basis U and the cached
/// projector Pi = U U'. Spanning sets are always re-orthonormalized at
/// construction, so the projector does not depend on the input basis.
class Subspace {
  public:
    /// From any full-column-rank spanning set (e.g. a raw feature matrix).
    explicit Subspace(const Matrix& spanning);

    /// The whole ambient space (U = I).
    static Subspace full(Index dim);

    Index ambient_dim() const { return u_.rows(); }
    Index rank() const { return u_.cols(); }
    const Matrix& basis() const { return u_; }
    const Matrix& projector() const { return projector_; }

    Vector project(const Vector& v) const;
    Vector reduce(const Vector& v) const { return u_.transpose() * v; }
    Vector lift(const Vector& reduced) const { return u_ * reduced; }

  private:
    Matrix u_;
    Matrix projector_;
};

/// Unique z in the subspace with Pi(A z) = Pi(b):
/// z = U (U' A U)^{-1} U' b. Throws ProjectedSingular when U' A U is
/// numerically singular.
Vector projected_linear_solve(const Subspace& sub, const Matrix& a,
                              const Vector& b);

/// The instantaneous constrained fast solution x_p*(y): the unique x in the
/// fast subspace with Pi_x(A_ff x + A_fs y - b1) = 0.
Vector x_p_of_y(const TwoTimeScaleSystem& sys, const Subspace& sub_x,
                const Vector& y);

struct ConstrainedSolution {
    Vector x_p;          // in the fast subspace
    Vector y_p;          // in the slow subspace
    Vector x_reduced;    // coordinates of x_p in the fast basis
    Vector y_reduced;    // coordinates of y_p in the slow basis
    double residual_fast = 0.0;  // |Pi_x(A_ff x_p + A_fs y_p - b1)|
    double residual_slow = 0.0;  // |Pi_y(A_sf x_p + A_ss y_p - b2)|
};

/// Solves the (d+r)-dimensional reduced block system directly. This is the
/// only code path that produces constrained solutions; the paper's chained
/// closed forms are used as bounds only.
ConstrainedSolution constrained_solution(const TwoTimeScaleSystem& sys,
                                         const Subspace& sub_x,
                                         const Subspace& sub_y);

/// (eps_x^2, eps_y^2): squared distances from the unconstrained solution to
/// the subspaces; orthogonal projection attains the infimum.
std::pair<double, double> approximation_errors(const SolutionPair& sol,
                                               const Subspace& sub_x,
                                               const Subspace& sub_y);

}  // namespace ttsa
