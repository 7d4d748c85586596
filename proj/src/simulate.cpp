#include "ttsa/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>

namespace ttsa {

void StepSizes::validate() const {
    if (!(alpha > 0.0) || !(beta > 0.0) || beta > alpha) {
        throw std::invalid_argument("step sizes: need 0 < beta <= alpha");
    }
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    auto splitmix = [](std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    };
    return splitmix(splitmix(master) ^ splitmix(index + 1));
}

IterateState initial_state(const Vector& x0, const Vector& y0) {
    IterateState s;
    s.t = 0;
    s.x = x0;
    s.y = y0;
    s.x0 = x0;
    s.y0 = y0;
    s.x_sum = Vector::Zero(x0.size());
    s.y_sum = Vector::Zero(y0.size());
    s.eps_sum = Vector::Zero(x0.size());
    s.psi_sum = Vector::Zero(y0.size());
    return s;
}

Simulator::Simulator(const TwoTimeScaleSystem& sys, const Subspace& sub_x,
                     const Subspace& sub_y, const StepSizes& steps,
                     const NoiseModel& noise)
    : proj_x_(sub_x.projector()),
      proj_y_(sub_y.projector()),
      steps_(steps),
      noise_(noise),
      n_(sys.fast_dim()),
      m_(sys.slow_dim()) {
    steps_.validate();
    if (sub_x.ambient_dim() != n_ || sub_y.ambient_dim() != m_) {
        throw DimensionMismatch("simulator: subspace ambient dims do not match system");
    }
    drift_op_.resize(n_ + m_, n_ + m_);
    drift_op_.topLeftCorner(n_, n_) = sys.a_ff;
    drift_op_.topRightCorner(n_, m_) = sys.a_fs;
    drift_op_.bottomLeftCorner(m_, n_) = sys.a_sf;
    drift_op_.bottomRightCorner(m_, m_) = sys.a_ss;
    offset_.resize(n_ + m_);
    offset_.head(n_) = sys.b1;
    offset_.tail(m_) = sys.b2;
    z_ = Vector::Zero(n_ + m_);
    dz_ = Vector::Zero(n_ + m_);
    eps_ = Vector::Zero(n_);
    psi_ = Vector::Zero(m_);
    x_work_ = Vector::Zero(n_);
    y_work_ = Vector::Zero(m_);
    x_next_ = Vector::Zero(n_);
    y_next_ = Vector::Zero(m_);
}

void Simulator::step(IterateState& state, RngStream& rng) {
    // Drift at the current point (both updates use x_t, y_t).
    z_.head(n_) = state.x;
    z_.tail(m_) = state.y;
    dz_.noalias() = drift_op_ * z_;
    dz_ -= offset_;

    if (noise_.kind == NoiseKind::gaussian_iid) {
        // eps before psi, coordinates in order: the seed fixes the trajectory.
        for (Index i = 0; i < n_; ++i) eps_(i) = noise_.sigma * rng.gaussian();
        for (Index i = 0; i < m_; ++i) psi_(i) = noise_.sigma * rng.gaussian();
        dz_.head(n_) += eps_;
        dz_.tail(m_) += psi_;
        state.eps_sum += eps_;
        state.psi_sum += psi_;
    }

    // PR averages cover x_0..x_{T-1}: accumulate the pre-step iterates.
    state.x_sum += state.x;
    state.y_sum += state.y;

    x_work_ = state.x;
    x_work_ += steps_.alpha * dz_.head(n_);
    y_work_ = state.y;
    y_work_ += steps_.beta * dz_.tail(m_);
    x_next_.noalias() = proj_x_ * x_work_;
    y_next_.noalias() = proj_y_ * y_work_;
    state.x.swap(x_next_);
    state.y.swap(y_next_);
    ++state.t;

    if (!state.x.allFinite() || !state.y.allFinite()) {
        throw NonFinite("step: non-finite iterate at t=" + std::to_string(state.t));
    }
}

void step(const TwoTimeScaleSystem& sys, const Subspace& sub_x,
          const Subspace& sub_y, const StepSizes& steps, const NoiseModel& noise,
          IterateState& state, RngStream& rng) {
    Simulator sim(sys, sub_x, sub_y, steps, noise);
    sim.step(state, rng);
}

IterateState run_iteration(const TwoTimeScaleSystem& sys, const Subspace& sub_x,
                           const Subspace& sub_y, const StepSizes& steps,
                           const NoiseModel& noise, long total_steps,
                           const Vector& x0, const Vector& y0,
                           std::uint64_t seed) {
    if (total_steps < 1) throw std::invalid_argument("run_iteration: need T >= 1");
    Simulator sim(sys, sub_x, sub_y, steps, noise);
    RngStream rng(seed);
    IterateState state = initial_state(x0, y0);
    for (long t = 0; t < total_steps; ++t) sim.step(state, rng);
    return state;
}

std::pair<double, double> telescoping_residuals(const TwoTimeScaleSystem& sys,
                                                const Subspace& sub_x,
                                                const Subspace& sub_y,
                                                const StepSizes& steps,
                                                const IterateState& state) {
    if (state.t < 1) {
        throw std::invalid_argument("telescoping_residuals: state has no steps");
    }
    const double t = static_cast<double>(state.t);
    const Vector x_bar = state.x_bar();
    const Vector y_bar = state.y_bar();
    const ConstrainedSolution sol = constrained_solution(sys, sub_x, sub_y);
    const Vector x_p_at_ybar = x_p_of_y(sys, sub_x, y_bar);

    const Vector lhs_fast = sub_x.project(sys.a_ff * (x_bar - x_p_at_ybar));
    const Vector rhs_fast = (state.x - state.x0) / (steps.alpha * t) -
                            sub_x.project(state.eps_sum) / t;

    const Vector lhs_slow = sub_y.project(sys.a_ss * (y_bar - sol.y_p) +
                                          sys.a_sf * (x_bar - sol.x_p));
    const Vector rhs_slow = (state.y - state.y0) / (steps.beta * t) -
                            sub_y.project(state.psi_sum) / t;

    return {(lhs_fast - rhs_fast).norm(), (lhs_slow - rhs_slow).norm()};
}

std::vector<long> geometric_checkpoints(long total_steps, int count,
                                        std::span<const long> extra) {
    if (total_steps < 1) throw std::invalid_argument("checkpoints: need T >= 1");
    std::set<long> grid;
    const double log_t = std::log(static_cast<double>(total_steps));
    const int points = std::max(count, 2);
    for (int i = 0; i < points; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(points - 1);
        const long t = std::lround(std::exp(f * log_t));
        grid.insert(std::clamp(t, 1L, total_steps));
    }
    grid.insert(total_steps);
    for (long t : extra) {
        if (t >= 1 && t <= total_steps) grid.insert(t);
    }
    return {grid.begin(), grid.end()};
}

TrialTrace run_trial(const TwoTimeScaleSystem& sys, const Subspace& sub_x,
                     const Subspace& sub_y, const StepSizes& steps,
                     const NoiseModel& noise, long total_steps, const Vector& x0,
                     const Vector& y0, std::span<const long> checkpoints,
                     std::uint64_t seed, const ReferencePoints& refs) {
    if (total_steps < 1) throw std::invalid_argument("run_trial: need T >= 1");
    Simulator sim(sys, sub_x, sub_y, steps, noise);
    RngStream rng(seed);
    IterateState state = initial_state(x0, y0);

    TrialTrace trace;
    trace.checkpoints.reserve(checkpoints.size());
    std::size_t next = 0;
    while (next < checkpoints.size() && checkpoints[next] < 1) ++next;
    for (long t = 1; t <= total_steps; ++t) {
        sim.step(state, rng);
        if (next < checkpoints.size() && checkpoints[next] == t) {
            const double inv_t = 1.0 / static_cast<double>(t);
            TraceRow row;
            row.t = t;
            row.stat_x = (state.x_sum * inv_t - refs.x_p).squaredNorm();
            row.stat_y = (state.y_sum * inv_t - refs.y_p).squaredNorm();
            row.total_x = (state.x_sum * inv_t - refs.x_star).squaredNorm();
            row.total_y = (state.y_sum * inv_t - refs.y_star).squaredNorm();
            row.last_x = (state.x - refs.x_p).squaredNorm();
            row.last_y = (state.y - refs.y_p).squaredNorm();
            trace.checkpoints.push_back(row);
            ++next;
        }
    }
    return trace;
}

ExperimentTrace run_experiment(const TwoTimeScaleSystem& sys,
                               const Subspace& sub_x, const Subspace& sub_y,
                               const StepSizes& steps, const NoiseModel& noise,
                               long total_steps, int trials,
                               std::uint64_t master_seed,
                               std::span<const long> checkpoints,
                               const Vector& x0, const Vector& y0,
                               const ReferencePoints& refs) {
    if (trials < 1) throw std::invalid_argument("run_experiment: need trials >= 1");

    // Trials are independent; run them on a small pool. Each trial owns the
    // stream derive_seed(master_seed, i), traces land in per-index slots, and
    // the reduction below walks them in index order, so the aggregate is
    // bitwise identical for any schedule (including single-threaded).
    std::vector<TrialTrace> traces(trials);
    std::vector<std::exception_ptr> errors(trials);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < trials; i = next.fetch_add(1)) {
            try {
                traces[i] = run_trial(sys, sub_x, sub_y, steps, noise,
                                      total_steps, x0, y0, checkpoints,
                                      derive_seed(master_seed, i), refs);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned pool = std::min<unsigned>(
        std::max(1u, std::thread::hardware_concurrency()),
        static_cast<unsigned>(trials));
    if (pool <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(pool);
        for (unsigned w = 0; w < pool; ++w) threads.emplace_back(worker);
        for (auto& th : threads) th.join();
    }
    for (int i = 0; i < trials; ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const NonFinite& e) {
            throw NonFinite("trial " + std::to_string(i) + ": " + e.what());
        }
    }

    ExperimentTrace agg;
    agg.trials = trials;
    agg.mean_rows = traces[0].checkpoints;
    for (int i = 1; i < trials; ++i) {
        for (std::size_t k = 0; k < agg.mean_rows.size(); ++k) {
            agg.mean_rows[k].stat_x += traces[i].checkpoints[k].stat_x;
            agg.mean_rows[k].stat_y += traces[i].checkpoints[k].stat_y;
            agg.mean_rows[k].total_x += traces[i].checkpoints[k].total_x;
            agg.mean_rows[k].total_y += traces[i].checkpoints[k].total_y;
            agg.mean_rows[k].last_x += traces[i].checkpoints[k].last_x;
            agg.mean_rows[k].last_y += traces[i].checkpoints[k].last_y;
        }
    }
    const double inv = 1.0 / static_cast<double>(trials);
    for (auto& row : agg.mean_rows) {
        row.stat_x *= inv;
        row.stat_y *= inv;
        row.total_x *= inv;
        row.total_y *= inv;
        row.last_x *= inv;
        row.last_y *= inv;
    }
    return agg;
}

}  // namespace ttsa
