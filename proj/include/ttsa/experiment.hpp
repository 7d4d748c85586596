#pragma once

// Experiment harness: run configuration, the two benchmark protocols, rate
// and majorant fits, and CSV/JSON artifact emission. Artifacts are byte
// reproducible for a fixed config and seed.

#include "ttsa/numkit.hpp"
#include "ttsa/projection.hpp"
#include "ttsa/system.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ttsa {

struct InsufficientData : NumericError {
    using NumericError::NumericError;
};

struct CurvePoint {
    long t = 0;
    double value = 0.0;
};

/// Windows are fractions of the largest checkpoint: points with
/// lo * t_max <= t <= hi * t_max participate in a fit.
struct FitWindow {
    double lo = 0.1;
    double hi = 1.0;
};

/// Least-squares slope of log(value) against log(t); needs >= 5 positive
/// points inside the window.
double fit_loglog_slope(std::span<const CurvePoint> curve, FitWindow window);

/// L_hat = max over the window of t * (value_t - floor), clamped at 0, so
/// L_hat / t + floor majorizes the curve on the window by construction.
/// Defaults to the full curve so the overlay majorizes every checkpoint.
double fit_majorant_constant(std::span<const CurvePoint> curve,
                             double floor_value, FitWindow window = {0.0, 1.0});

/// Least squares of t * value(t) = a + b / t over the window; a estimates the
/// leading 1/t coefficient and b the 1/t^2 remainder.
std::pair<double, double> fit_inverse_t_law(std::span<const CurvePoint> curve,
                                            FitWindow window);

enum class InitKind { constrained, zero };

struct RunConfig {
    std::string experiment = "synthetic";  // synthetic | gtd | check | bounds

    // Instance knobs (synthetic generator; also the default instance for
    // check/bounds).
    long n = 20;
    long m = 16;
    long r = 6;
    double coupling_scale = 0.08;
    double decay_rate = 0.7;
    std::vector<double> spectrum_fast;  // empty -> built-in defaults
    std::vector<double> spectrum_slow;

    // Iteration knobs.
    double alpha = 0.2;
    double beta = 0.01;
    std::string noise_kind = "gaussian_iid";  // gaussian_iid | none
    double sigma = 0.08;
    long steps = 5000;
    int trials = 25;
    std::uint64_t seed = 42;
    std::string init = "constrained";  // constrained | zero

    // Reporting knobs.
    int checkpoint_count = 50;
    std::vector<long> bound_check_ts = {100, 1000, 5000};
    double fit_window_lo = 0.1;
    double fit_window_hi = 1.0;
    std::string out_dir = "out";
    bool dump_system = false;

    // Optional replay inputs (check/bounds).
    std::string system_file;
    std::string basis_x_file;
    std::string basis_y_file;

    /// Throws std::invalid_argument naming the failing key.
    void validate() const;
};

/// Paper-default configuration for a subcommand (gtd switches alpha/beta/steps).
RunConfig default_config(const std::string& experiment);

/// Overlays keys from a JSON file onto `base`; unknown keys are rejected.
RunConfig load_config_file(const std::filesystem::path& path, RunConfig base);

/// Executes the configured experiment and writes its artifacts into
/// config.out_dir (trace*.csv, summary.json). Throws on any module failure.
void run(const RunConfig& config);

// Structured-text schema for systems and subspace bases (row-major nested
// arrays under keys A_ff, A_fs, A_sf, A_ss, b1, b2, and U); the writer emits
// bit-exactly round-trippable doubles.
void save_system(const std::filesystem::path& path, const TwoTimeScaleSystem& sys);
TwoTimeScaleSystem load_system(const std::filesystem::path& path);
void save_subspace(const std::filesystem::path& path, const Subspace& sub);
Subspace load_subspace(const std::filesystem::path& path);

}  // namespace ttsa
