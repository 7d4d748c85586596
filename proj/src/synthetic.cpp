#include "ttsa/synthetic.hpp"

#include "ttsa/simulate.hpp"

#include <cmath>
#include <stdexcept>

namespace ttsa {

std::vector<double> default_fast_spectrum(Index n) {
    std::vector<double> s(n);
    for (Index k = 0; k < n; ++k) {
        s[k] = -(0.5 + 1.5 * (n > 1 ? static_cast<double>(k) / static_cast<double>(n - 1) : 0.0));
    }
    return s;
}

std::vector<double> default_slow_spectrum(Index m) {
    std::vector<double> s(m);
    for (Index k = 0; k < m; ++k) {
        s[k] = -(1.5 + 1.5 * (m > 1 ? static_cast<double>(k) / static_cast<double>(m - 1) : 0.0));
    }
    return s;
}

void SyntheticConfig::validate() const {
    if (n < 1 || m < 1) throw std::invalid_argument("synthetic: dims must be >= 1");
    if (r < 1 || r > std::min(n, m)) {
        throw std::invalid_argument("synthetic: need 1 <= r <= min(n, m)");
    }
    if (coupling_scale < 0.0) {
        throw std::invalid_argument("synthetic: coupling_scale must be >= 0");
    }
    if (!spectrum_fast.empty() && static_cast<Index>(spectrum_fast.size()) != n) {
        throw std::invalid_argument("synthetic: spectrum_fast must have n entries");
    }
    if (!spectrum_slow.empty() && static_cast<Index>(spectrum_slow.size()) != m) {
        throw std::invalid_argument("synthetic: spectrum_slow must have m entries");
    }
    for (double v : spectrum_fast) {
        if (!(v < 0.0)) throw std::invalid_argument("synthetic: spectra must be strictly negative");
    }
    for (double v : spectrum_slow) {
        if (!(v < 0.0)) throw std::invalid_argument("synthetic: spectra must be strictly negative");
    }
}

namespace {

Matrix gaussian_matrix(RngStream& rng, Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) m(i, j) = rng.gaussian();
    }
    return m;
}

}  // namespace

SyntheticInstance generate(const SyntheticConfig& cfg) {
    cfg.validate();
    const std::vector<double> spec_f =
        cfg.spectrum_fast.empty() ? default_fast_spectrum(cfg.n) : cfg.spectrum_fast;
    const std::vector<double> spec_s =
        cfg.spectrum_slow.empty() ? default_slow_spectrum(cfg.m) : cfg.spectrum_slow;

    // Draw order is fixed: fast basis, slow basis, A_fs, A_sf.
    RngStream rng(cfg.seed);
    const Matrix basis_fast = qr_orthonormalize(gaussian_matrix(rng, cfg.n, cfg.n));
    const Matrix basis_slow = qr_orthonormalize(gaussian_matrix(rng, cfg.m, cfg.m));

    TwoTimeScaleSystem sys;
    sys.a_ff = basis_fast *
               Eigen::Map<const Vector>(spec_f.data(), cfg.n).asDiagonal() *
               basis_fast.transpose();
    sys.a_ss = basis_slow *
               Eigen::Map<const Vector>(spec_s.data(), cfg.m).asDiagonal() *
               basis_slow.transpose();
    sys.a_fs = cfg.coupling_scale * gaussian_matrix(rng, cfg.n, cfg.m);
    sys.a_sf = cfg.coupling_scale * gaussian_matrix(rng, cfg.m, cfg.n);

    // Ground truth with exponentially decaying coordinates (k = 1..dim) in the
    // eigenbases; the offsets are constructed so the root equations hold
    // exactly.
    Vector coeff_x(cfg.n), coeff_y(cfg.m);
    for (Index k = 0; k < cfg.n; ++k) coeff_x(k) = std::exp(-cfg.decay_rate * static_cast<double>(k + 1));
    for (Index k = 0; k < cfg.m; ++k) coeff_y(k) = std::exp(-cfg.decay_rate * static_cast<double>(k + 1));
    SolutionPair sol{basis_fast * coeff_x, basis_slow * coeff_y};
    sys.b1 = sys.a_ff * sol.x_star + sys.a_fs * sol.y_star;
    sys.b2 = sys.a_sf * sol.x_star + sys.a_ss * sol.y_star;
    sys.validate();

    SyntheticInstance inst{std::move(sys), std::move(sol),
                           Subspace(basis_fast.leftCols(cfg.r)),
                           Subspace(basis_slow.leftCols(cfg.r))};

    const AssumptionReport rep =
        check_assumptions(inst.system, inst.sub_x, inst.sub_y, 0.0, 0.0);
    if (!rep.matrix_assumptions_pass()) {
        throw AssumptionViolated("synthetic: generated instance fails the assumption checker");
    }
    return inst;
}

}  // namespace ttsa
