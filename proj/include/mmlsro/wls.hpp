#pragma once

#include "mmlsro/types.hpp"

#include <cmath>

namespace mmlsro {

/// Minimize sum_i w_i * ||A.row(i) * C - B.row(i)||^2 over C (M x nrhs).
/// Householder QR on the sqrt(w)-scaled design; when the triangular factor
/// signals rank trouble, falls back to normal equations with ridge
/// 1e-12 * trace(Gram) / M.
inline Matrix weighted_least_squares(const Matrix& A, const Matrix& B, const Vector& w) {
    const Index rows = A.rows();
    const Index M = A.cols();
    if (B.rows() != rows || w.size() != rows)
        throw std::invalid_argument("weighted_least_squares: shape mismatch");
    if (rows < M) throw InsufficientSupport("weighted_least_squares: fewer rows than unknowns");

    const Vector sqrt_w = w.cwiseMax(0.0).cwiseSqrt();
    const Matrix As = sqrt_w.asDiagonal() * A;
    const Matrix Bs = sqrt_w.asDiagonal() * B;

    Eigen::HouseholderQR<Matrix> qr(As);
    const auto r_diag = qr.matrixQR().diagonal().head(M).cwiseAbs();
    const Scalar r_max = r_diag.maxCoeff();
    bool rank_warning = !(r_max > 0) || r_diag.minCoeff() < 1e-12 * r_max;

    Matrix coeffs;
    if (!rank_warning) {
        coeffs = qr.solve(Bs);
        if (!coeffs.allFinite()) rank_warning = true;
    }
    if (rank_warning) {
        Matrix gram = As.transpose() * As;
        const Scalar ridge = 1e-12 * gram.trace() / static_cast<Scalar>(M);
        gram.diagonal().array() += ridge;
        Eigen::LLT<Matrix> llt(gram);
        if (llt.info() != Eigen::Success)
            throw IllConditioned("weighted_least_squares: singular after ridge fallback");
        coeffs = llt.solve(As.transpose() * Bs);
        if (!coeffs.allFinite())
            throw IllConditioned("weighted_least_squares: non-finite coefficients");
    }
    return coeffs;
}

}  // namespace mmlsro
