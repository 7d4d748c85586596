#pragma once

// The coupled linear root-finding problem: find (x*, y*) with
//   A_ff x* + A_fs y* - b1 = 0   (fast equation)
//   A_sf x* + A_ss y* - b2 = 0   (slow equation)
// plus the stability/well-posedness checker used before any run.

#include "ttsa/numkit.hpp"

#include <utility>

namespace ttsa {

class Subspace;

struct TwoTimeScaleSystem {
    Matrix a_ff;  // n x n fast self-dynamics
    Matrix a_fs;  // n x m fast<-slow coupling
    Matrix a_sf;  // m x n slow<-fast coupling
    Matrix a_ss;  // m x m slow self-dynamics
    Vector b1;    // n
    Vector b2;    // m

    Index fast_dim() const { return a_ff.rows(); }
    Index slow_dim() const { return a_ss.rows(); }

    /// Residual scale used by all solution tolerances.
    double scale() const { return 1.0 + b1.norm() + b2.norm(); }

    /// Throws DimensionMismatch / NumericError on inconsistent or non-finite
    /// blocks.
    void validate() const;
};

struct SolutionPair {
    Vector x_star;
    Vector y_star;
};

/// A pass/fail together with the measured scalar that justified it.
struct Verdict {
    bool pass = false;
    double value = 0.0;
};

struct AssumptionReport {
    Verdict a1_aff_hurwitz;        // value: spectral abscissa of A_ff
    Verdict a1_schur_hurwitz;      // value: abscissa of the Schur complement
    Verdict a2_fast_hurwitz;       // value: abscissa of U_x' A_ff U_x
    Verdict a2_slow_hurwitz;       // value: abscissa of U_y' (A_ss - A_sf c1 A_fs) U_y
    Verdict a2_slow_plus_variant;  // the "+" form, reported for transparency only
    Verdict a3_mu_y_positive;      // value: mu_y = sigma_min(U_y' (I - A_ss) U_y)
    Verdict a3_resolvent_xy;       // value: relative sigma_min of I - c3 A_fs c4 A_sf
    Verdict a3_resolvent_yx;       // value: relative sigma_min of I - c4 A_sf c3 A_fs
    Verdict step_alpha;            // value: alpha * |A_ff|_2, must be < 1
    Verdict step_beta;             // value: beta * |A_ss|_2, vacuous when |A_ss|_2 = 0
    Verdict step_ratio;            // value: beta / alpha, must be <= 0.1

    bool step_sizes_ok() const {
        return step_alpha.pass && step_beta.pass && step_ratio.pass;
    }
    /// Assumptions 1-3 (the intrinsic matrix conditions; excludes step sizes
    /// and the reported-only "+" variant).
    bool matrix_assumptions_pass() const;
    bool all_pass() const { return matrix_assumptions_pass() && step_sizes_ok(); }
};

/// Evaluates (g, h) = (A_ff x + A_fs y - b1, A_sf x + A_ss y - b2).
std::pair<Vector, Vector> drift(const TwoTimeScaleSystem& sys, const Vector& x,
                                const Vector& y);

/// Solves the full (n+m)-dimensional block system.
SolutionPair unconstrained_solution(const TwoTimeScaleSystem& sys);

/// Delta = A_ss - A_sf A_ff^{-1} A_fs.
Matrix schur_complement(const TwoTimeScaleSystem& sys);

/// Runs every assumption check; failures are verdicts, never exceptions.
/// The slow projected operator uses the sign-corrected minus form
/// U_y'(A_ss - A_sf c1 A_fs)U_y, which matches the Schur complement in the
/// full-subspace limit; the printed "+" form is evaluated and reported in
/// a2_slow_plus_variant.
AssumptionReport check_assumptions(const TwoTimeScaleSystem& sys,
                                   const Subspace& sub_x, const Subspace& sub_y,
                                   double alpha, double beta);

}  // namespace ttsa
