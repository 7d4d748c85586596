#pragma once

// Policy-evaluation benchmark: a 9-state MDP whose value function has a known
// eigendecomposition, the tabular gradient-TD two-time-scale system, and the
// three feature-alignment regimes.

#include "ttsa/numkit.hpp"
#include "ttsa/simulate.hpp"
#include "ttsa/system.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace ttsa {

struct Mdp {
    Matrix transition;  // S x S row-stochastic policy-induced kernel
    Vector reward;      // S
    double gamma = 0.0;

    Index num_states() const { return transition.rows(); }
    void validate() const;
};

struct ValueSpec {
    Matrix w;      // S x S orthonormal basis
    Vector coeffs;  // coefficients c with V = W c
    Vector v_pi;   // exact value function
};

inline constexpr Index kGtdStates = 9;
inline constexpr double kGtdGamma = 0.9;

/// Builds the 9-state MDP: W is a seeded random orthonormal basis, the value
/// coefficients are [3.0, 2.4, 1.8, 1.4, 1.1, 0.5, 1e-3, 5e-4, 1e-4], the
/// kernel is 0.9 * (seeded random row-stochastic) + 0.1 * uniform, and the
/// reward is (I - gamma P) V so the Bellman equation holds exactly.
std::pair<Mdp, ValueSpec> build_mdp(std::uint64_t seed);

/// Tabular GTD as a two-time-scale system: fast variable u tracks the TD
/// error, slow variable V descends it.
///   A_ff = -I, A_fs = gamma P - I, b1 = -reward,
///   A_sf = (I - gamma P)', A_ss = 0, b2 = 0
/// so g = (reward + gamma P V - V) - u and h = (I - gamma P)' u.
TwoTimeScaleSystem gtd_system(const Mdp& mdp);

enum class FeatureAlignment { well, medium, poor };
const char* to_string(FeatureAlignment a);

struct FeatureFamily {
    FeatureAlignment label;
    Matrix phi;  // S x 3, full column rank
};

/// well = [w1 w2 w3], medium = seeded random orthonormal 9x3, poor = [w7 w8 w9].
std::array<FeatureFamily, 3> feature_families(const ValueSpec& vs,
                                              std::uint64_t seed);

struct GtdErrorRow {
    long t = 0;
    double approx = 0.0;  // |V - Phi theta*|^2, t-independent
    double stat = 0.0;    // |Phi theta* - Phi thetabar_t|^2
    double total = 0.0;   // |V - Phi thetabar_t|^2
};

/// Relabels a trace produced with X = Y = span(Phi) into the three reported
/// value-space curves; phi_theta_star is the slow constrained solution y_p*.
std::vector<GtdErrorRow> gtd_errors(std::span<const TraceRow> trace,
                                    const Vector& v_pi,
                                    const Vector& phi_theta_star);

}  // namespace ttsa
