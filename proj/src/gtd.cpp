#include "ttsa/gtd.hpp"

#include <stdexcept>

namespace ttsa {

namespace {

// Internal substream tags so the MDP draw and the random feature draw never
// overlap even though callers pass one seed.
constexpr std::uint64_t kMdpStream = 0x6D6470;      // "mdp"
constexpr std::uint64_t kFeatureStream = 0x666561;  // "fea"

Matrix gaussian_matrix(RngStream& rng, Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) m(i, j) = rng.gaussian();
    }
    return m;
}

}  // namespace

void Mdp::validate() const {
    const Index s = transition.rows();
    if (transition.cols() != s || reward.size() != s) {
        throw DimensionMismatch("mdp: kernel must be square and match the reward");
    }
    if (!(gamma > 0.0) || !(gamma < 1.0)) {
        throw std::invalid_argument("mdp: gamma must lie in (0, 1)");
    }
    if (transition.minCoeff() < 0.0) {
        throw std::invalid_argument("mdp: kernel entries must be >= 0");
    }
    for (Index i = 0; i < s; ++i) {
        if (std::abs(transition.row(i).sum() - 1.0) > 1e-12) {
            throw std::invalid_argument("mdp: kernel rows must sum to 1");
        }
    }
}

std::pair<Mdp, ValueSpec> build_mdp(std::uint64_t seed) {
    const Index s = kGtdStates;

    ValueSpec vs;
    {
        RngStream rng(derive_seed(seed, kMdpStream));
        vs.w = qr_orthonormalize(gaussian_matrix(rng, s, s));
        vs.coeffs = Vector(s);
        vs.coeffs << 3.0, 2.4, 1.8, 1.4, 1.1, 0.5, 1e-3, 5e-4, 1e-4;
        vs.v_pi = vs.w * vs.coeffs;

        Mdp mdp;
        mdp.gamma = kGtdGamma;
        mdp.transition = Matrix(s, s);
        for (Index i = 0; i < s; ++i) {
            for (Index j = 0; j < s; ++j) mdp.transition(i, j) = rng.uniform();
            mdp.transition.row(i) /= mdp.transition.row(i).sum();
        }
        mdp.transition = 0.9 * mdp.transition +
                         Matrix::Constant(s, s, 0.1 / static_cast<double>(s));
        // Reward reverse-engineered so V solves the Bellman equation exactly.
        mdp.reward = (Matrix::Identity(s, s) - mdp.gamma * mdp.transition) * vs.v_pi;
        mdp.validate();
        return {std::move(mdp), std::move(vs)};
    }
}

TwoTimeScaleSystem gtd_system(const Mdp& mdp) {
    mdp.validate();
    const Index s = mdp.num_states();
    const Matrix bellman_op = Matrix::Identity(s, s) - mdp.gamma * mdp.transition;
    TwoTimeScaleSystem sys;
    sys.a_ff = -Matrix::Identity(s, s);
    sys.a_fs = -bellman_op;
    sys.a_sf = bellman_op.transpose();
    sys.a_ss = Matrix::Zero(s, s);
    sys.b1 = -mdp.reward;
    sys.b2 = Vector::Zero(s);
    sys.validate();
    return sys;
}

const char* to_string(FeatureAlignment a) {
    switch (a) {
        case FeatureAlignment::well: return "well";
        case FeatureAlignment::medium: return "medium";
        case FeatureAlignment::poor: return "poor";
    }
    return "unknown";
}

std::array<FeatureFamily, 3> feature_families(const ValueSpec& vs,
                                              std::uint64_t seed) {
    RngStream rng(derive_seed(seed, kFeatureStream));
    const Matrix random_basis =
        qr_orthonormalize(gaussian_matrix(rng, vs.w.rows(), 3));
    return {FeatureFamily{FeatureAlignment::well, vs.w.leftCols(3)},
            FeatureFamily{FeatureAlignment::medium, random_basis},
            FeatureFamily{FeatureAlignment::poor, vs.w.rightCols(3)}};
}

std::vector<GtdErrorRow> gtd_errors(std::span<const TraceRow> trace,
                                    const Vector& v_pi,
                                    const Vector& phi_theta_star) {
    const double approx = (v_pi - phi_theta_star).squaredNorm();
    std::vector<GtdErrorRow> rows;
    rows.reserve(trace.size());
    for (const TraceRow& r : trace) {
        rows.push_back({r.t, approx, r.stat_y, r.total_y});
    }
    return rows;
}

}  // namespace ttsa
