#pragma once

// The projected two-time-scale iteration with constant step sizes,
// martingale-difference noise, streaming Polyak-Ruppert averaging, exact
// telescoping diagnostics, and a seeded multi-trial runner.

#include "ttsa/numkit.hpp"
#include "ttsa/projection.hpp"
#include "ttsa/system.hpp"

#include <cstdint>
#include <cmath>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace ttsa {

/// An iterate coordinate became non-finite; the message reports the step.
struct NonFinite : NumericError {
    using NumericError::NumericError;
};

struct StepSizes {
    double alpha = 0.0;  // fast step
    double beta = 0.0;   // slow step
    void validate() const;  // requires 0 < beta <= alpha
};

enum class NoiseKind { none, gaussian_iid };

/// Martingale-difference noise: conditional mean zero, conditional second
/// moment bounded by C. gaussian_iid draws each coordinate independently with
/// standard deviation sigma, so the exact conditional second moments are
/// n sigma^2 and m sigma^2 - the tightest admissible bounds.
struct NoiseModel {
    NoiseKind kind = NoiseKind::none;
    double sigma = 0.0;

    static NoiseModel none() { return {NoiseKind::none, 0.0}; }
    static NoiseModel gaussian(double sigma) { return {NoiseKind::gaussian_iid, sigma}; }

    double c_eps(Index fast_dim) const {
        return kind == NoiseKind::gaussian_iid ? static_cast<double>(fast_dim) * sigma * sigma : 0.0;
    }
    double c_psi(Index slow_dim) const {
        return kind == NoiseKind::gaussian_iid ? static_cast<double>(slow_dim) * sigma * sigma : 0.0;
    }
};

/// Deterministic substream derivation (splitmix64 mixing); trial i of a run
/// with master seed s uses derive_seed(s, i).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// mt19937_64 stream with a Marsaglia-polar standard normal. The whole draw
/// path is pinned to the standardized engine sequence, so trajectories are
/// reproducible across standard libraries, not just across runs.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double mul = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * mul;
        has_spare_ = true;
        return u * mul;
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

struct IterateState {
    long t = 0;
    Vector x, y;            // current iterates x_t, y_t (always in-subspace)
    Vector x0, y0;          // initial iterates (for boundary terms)
    Vector x_sum, y_sum;    // sums of x_0..x_{t-1}, y_0..y_{t-1}
    Vector eps_sum, psi_sum;  // sums of realized noises

    Vector x_bar() const { return x_sum / static_cast<double>(t); }
    Vector y_bar() const { return y_sum / static_cast<double>(t); }
};

IterateState initial_state(const Vector& x0, const Vector& y0);

/// Owns the system blocks and preallocated workspace so that stepping is
/// allocation-free. A Simulator is cheap to build and strictly sequential;
/// independent trials each build their own.
class Simulator {
  public:
    Simulator(const TwoTimeScaleSystem& sys, const Subspace& sub_x,
              const Subspace& sub_y, const StepSizes& steps,
              const NoiseModel& noise);

    /// One update
    ///   x_{t+1} = Pi_x[x_t + alpha (g(x_t, y_t) + eps_t)]
    ///   y_{t+1} = Pi_y[y_t + beta  (h(x_t, y_t) + psi_t)]
    /// drawing eps before psi (coordinate order 0..dim-1), then advancing the
    /// running sums with the pre-step iterates.
    void step(IterateState& state, RngStream& rng);

  private:
    // The four coupling blocks packed into one (n+m)-dimensional operator so
    // a step costs a single drift gemv plus the two projections.
    Matrix drift_op_;  // [[A_ff, A_fs], [A_sf, A_ss]]
    Vector offset_;    // (b1; b2)
    const Matrix& proj_x_;
    const Matrix& proj_y_;
    StepSizes steps_;
    NoiseModel noise_;
    Index n_, m_;
    Vector z_, dz_, eps_, psi_, x_work_, y_work_, x_next_, y_next_;
};

/// Single reference step (builds a Simulator internally; tests and small
/// callers only).
void step(const TwoTimeScaleSystem& sys, const Subspace& sub_x,
          const Subspace& sub_y, const StepSizes& steps, const NoiseModel& noise,
          IterateState& state, RngStream& rng);

/// Runs total_steps updates and returns the final state.
IterateState run_iteration(const TwoTimeScaleSystem& sys, const Subspace& sub_x,
                           const Subspace& sub_y, const StepSizes& steps,
                           const NoiseModel& noise, long total_steps,
                           const Vector& x0, const Vector& y0,
                           std::uint64_t seed);

/// Exact per-trajectory identities obtained by summing the recursion:
///   res_fast = |Pi_x A_ff (xbar_T - x_p*(ybar_T))
///               - [(x_T - x_0)/(alpha T) - Pi_x epsbar_T / T]|
///   res_slow = |Pi_y (A_ss (ybar_T - y_p*) + A_sf (xbar_T - x_p*))
///               - [(y_T - y_0)/(beta T) - Pi_y psibar_T / T]|
/// where epsbar/psibar are the recorded noise sums. Both are algebraic
/// identities of the recursion and certify the update, the averaging, and the
/// constrained-solution solver at once.
std::pair<double, double> telescoping_residuals(const TwoTimeScaleSystem& sys,
                                                const Subspace& sub_x,
                                                const Subspace& sub_y,
                                                const StepSizes& steps,
                                                const IterateState& final_state);

struct TraceRow {
    long t = 0;
    double stat_x = 0.0;   // |xbar_t - x_p*|^2
    double stat_y = 0.0;   // |ybar_t - y_p*|^2
    double total_x = 0.0;  // |xbar_t - x*|^2
    double total_y = 0.0;  // |ybar_t - y*|^2
    double last_x = 0.0;   // |x_t - x_p*|^2
    double last_y = 0.0;   // |y_t - y_p*|^2
};

struct TrialTrace {
    std::vector<TraceRow> checkpoints;
};

/// Error targets for trace columns.
struct ReferencePoints {
    Vector x_p, y_p;        // constrained solution
    Vector x_star, y_star;  // unconstrained solution
};

/// Geometric grid of ~count checkpoints on [1, total_steps], always including
/// total_steps, merged with any extras that fall inside the range.
std::vector<long> geometric_checkpoints(long total_steps, int count = 50,
                                        std::span<const long> extra = {});

TrialTrace run_trial(const TwoTimeScaleSystem& sys, const Subspace& sub_x,
                     const Subspace& sub_y, const StepSizes& steps,
                     const NoiseModel& noise, long total_steps, const Vector& x0,
                     const Vector& y0, std::span<const long> checkpoints,
                     std::uint64_t seed, const ReferencePoints& refs);

struct ExperimentTrace {
    std::vector<TraceRow> mean_rows;  // per-checkpoint mean over trials
    int trials = 0;
};

/// Trial i uses derive_seed(master_seed, i); aggregation is an index-ordered
/// reduction, so the output is reproducible regardless of scheduling.
ExperimentTrace run_experiment(const TwoTimeScaleSystem& sys,
                               const Subspace& sub_x, const Subspace& sub_y,
                               const StepSizes& steps, const NoiseModel& noise,
                               long total_steps, int trials,
                               std::uint64_t master_seed,
                               std::span<const long> checkpoints,
                               const Vector& x0, const Vector& y0,
                               const ReferencePoints& refs);

}  // namespace ttsa
