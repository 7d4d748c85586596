#pragma once

// Dense numerical primitives shared by every other module. All matrices are
// small (ambient dimensions in the dozens), so everything runs through
// Eigen's dense decompositions in 64-bit floating point.

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace ttsa {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input matrix is numerically rank deficient where full rank is required.
struct RankDeficient : NumericError {
    using NumericError::NumericError;
};

/// Linear system is numerically singular (condition estimate > 1e12).
struct Singular : NumericError {
    using NumericError::NumericError;
};

/// Eigenvalue iteration failed to converge; the result is not usable.
struct NonConvergence : NumericError {
    using NumericError::NumericError;
};

struct DimensionMismatch : NumericError {
    using NumericError::NumericError;
};

// A matrix is accepted as Hurwitz iff its spectral abscissa is below this
// margin; the strict margin avoids accepting marginally stable numerics.
inline constexpr double kHurwitzMargin = -1e-9;

// Relative sigma_min cutoff used everywhere an assumption says "invertible".
inline constexpr double kSingularRelTol = 1e-10;

// Condition-estimate cutoff for solve_linear.
inline constexpr double kConditionLimit = 1e12;

/// Orthonormal basis of range(m) via Householder QR, with column signs fixed
/// so the implied R has a nonnegative diagonal (makes the result unique).
/// Requires cols <= rows and full numerical column rank.
Matrix qr_orthonormalize(const Matrix& m);

/// Solve a x = b for square a. Throws Singular when the SVD condition
/// estimate exceeds kConditionLimit.
Vector solve_linear(const Matrix& a, const Vector& b);

/// Column-wise variant: solves a X = b for a matrix right-hand side.
Matrix solve_linear(const Matrix& a, const Matrix& b);

/// Smallest singular value (0 for the zero matrix).
double min_singular_value(const Matrix& m);

/// Largest real part over the eigenvalues of a square matrix.
double spectral_abscissa(const Matrix& m);

/// Largest singular value (spectral norm).
double operator_norm(const Matrix& m);

inline bool is_hurwitz(const Matrix& m) {
    return spectral_abscissa(m) < kHurwitzMargin;
}

}  // namespace ttsa
