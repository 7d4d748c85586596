#include "ttsa/numkit.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace ttsa {

namespace {

Eigen::JacobiSVD<Matrix> singular_values_of(const Matrix& m) {
    return Eigen::JacobiSVD<Matrix>(m);
}

}  // namespace

Matrix qr_orthonormalize(const Matrix& m) {
    if (m.rows() == 0 || m.cols() == 0) {
        throw DimensionMismatch("qr_orthonormalize: empty matrix");
    }
    if (m.cols() > m.rows()) {
        throw DimensionMismatch("qr_orthonormalize: more columns than rows");
    }
    const auto svd = singular_values_of(m);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) < kSingularRelTol * sv(0)) {
        throw RankDeficient("qr_orthonormalize: numerically rank-deficient input");
    }

    Eigen::HouseholderQR<Matrix> qr(m);
    Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
    const Matrix r = qr.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
    // Fix signs so diag(R) >= 0; the factorization becomes unique.
    for (Index j = 0; j < m.cols(); ++j) {
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    }
    return q;
}

Vector solve_linear(const Matrix& a, const Vector& b) {
    if (a.rows() != a.cols()) {
        throw DimensionMismatch("solve_linear: matrix is not square");
    }
    if (a.rows() != b.size()) {
        throw DimensionMismatch("solve_linear: rhs size does not match");
    }
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    if (smin <= 0.0 || smax / smin > kConditionLimit) {
        throw Singular("solve_linear: matrix is numerically singular");
    }
    return svd.solve(b);
}

Matrix solve_linear(const Matrix& a, const Matrix& b) {
    if (a.rows() != a.cols()) {
        throw DimensionMismatch("solve_linear: matrix is not square");
    }
    if (a.rows() != b.rows()) {
        throw DimensionMismatch("solve_linear: rhs rows do not match");
    }
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    if (smin <= 0.0 || smax / smin > kConditionLimit) {
        throw Singular("solve_linear: matrix is numerically singular");
    }
    return svd.solve(b);
}

double min_singular_value(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    const auto svd = singular_values_of(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

double spectral_abscissa(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw DimensionMismatch("spectral_abscissa: matrix is not square");
    }
    Eigen::EigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        throw NonConvergence("spectral_abscissa: eigenvalue iteration failed");
    }
    return es.eigenvalues().real().maxCoeff();
}

double operator_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    const auto svd = singular_values_of(m);
    return svd.singularValues()(0);
}

}  // namespace ttsa
