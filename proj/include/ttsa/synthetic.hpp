#pragma once

// Generator for the coupled stable benchmark system: negative-definite
// self-dynamics diagonal in random orthonormal bases, small random
// cross-couplings, a ground truth with exponentially decaying coordinates,
// and rank-r feasible subspaces aligned with the leading eigendirections.

#include "ttsa/numkit.hpp"
#include "ttsa/projection.hpp"
#include "ttsa/system.hpp"

#include <cstdint>
#include <vector>

namespace ttsa {

/// The generated instance failed the assumption checker.
struct AssumptionViolated : NumericError {
    using NumericError::NumericError;
};

struct SyntheticConfig {
    Index n = 20;
    Index m = 16;
    Index r = 6;
    double coupling_scale = 0.08;
    double decay_rate = 0.7;
    std::vector<double> spectrum_fast;  // empty -> default_fast_spectrum(n)
    std::vector<double> spectrum_slow;  // empty -> default_slow_spectrum(m)
    std::uint64_t seed = 1;

    void validate() const;
};

std::vector<double> default_fast_spectrum(Index n);  // -linspace(0.5, 2.0, n)
std::vector<double> default_slow_spectrum(Index m);  // -linspace(1.5, 3.0, m)

struct SyntheticInstance {
    TwoTimeScaleSystem system;
    SolutionPair solution;  // exact by construction of b1, b2
    Subspace sub_x;
    Subspace sub_y;
};

/// Deterministic given cfg.seed. Throws AssumptionViolated when the drawn
/// instance fails the matrix assumptions (regenerating with another seed is
/// the caller's choice).
SyntheticInstance generate(const SyntheticConfig& cfg);

}  // namespace ttsa
