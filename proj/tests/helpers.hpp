#pragma once

// Shared oracles and fixtures for the test suites.

#include "mmlsro/point_cloud.hpp"
#include "mmlsro/rng.hpp"

#include <Eigen/Dense>

namespace testutil {

using namespace mmlsro;

// sin of the largest principal angle between the ranges of two bases
inline Scalar principal_angle_sin(const Matrix& a, const Matrix& b) {
    const auto projector = [](const Matrix& m) -> Matrix {
        Eigen::HouseholderQR<Matrix> qr(m);
        const Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
        return q * q.transpose();
    };
    Eigen::JacobiSVD<Matrix> svd(projector(a) - projector(b));
    return svd.singularValues()[0];
}

struct PlaneCloud {
    SampleSet set;
    Vector origin;
    Matrix basis;  // D x d orthonormal

    Vector embed(const Vector& t) const { return origin + basis * t; }
    Vector project(const Vector& x) const {
        return origin + basis * (basis.transpose() * (x - origin));
    }
};

// Samples scattered exactly on an affine d-plane in R^D.
inline PlaneCloud make_plane_cloud(int D, int d, Index n, std::uint64_t seed,
                                   Scalar box = 1.0) {
    Rng rng(seed);
    const Matrix gauss = rng.normal_matrix(D, d);
    Eigen::HouseholderQR<Matrix> qr(gauss);
    const Matrix basis = qr.householderQ() * Matrix::Identity(D, d);
    Vector origin = rng.normal_vector(D);

    Matrix pts(n, D);
    for (Index i = 0; i < n; ++i) {
        Vector t(d);
        for (int j = 0; j < d; ++j) t[j] = rng.uniform(-box, box);
        pts.row(i) = (origin + basis * t).transpose();
    }
    return PlaneCloud{SampleSet(pts, std::nullopt, d), std::move(origin), basis};
}

// Deterministic unit vectors for sphere queries.
inline std::vector<Vector> unit_queries(int D, int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Vector> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        Vector v = rng.normal_vector(D);
        while (v.norm() < 1e-12) v = rng.normal_vector(D);
        out.push_back(v / v.norm());
    }
    return out;
}

inline Scalar median(std::vector<Scalar> values) {
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
    std::nth_element(values.begin(), mid, values.end());
    return *mid;
}

}  // namespace testutil
