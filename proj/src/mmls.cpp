#include "mmlsro/mmls.hpp"

#include "mmlsro/monomials.hpp"
#include "mmlsro/wls.hpp"
#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mmlsro {

using detail::Support;
using detail::collect_support;

Vector VectorPoly::eval(const ConstVectorRef& x) const {
    return coeffs.transpose() * monomial_basis(degree, x);
}

LocalFrame local_frame(const SampleSet& set, const ConstVectorRef& r, const WeightSpec& spec,
                       const FrameConfig& cfg) {
    if (r.size() != set.ambient_dim())
        throw std::invalid_argument("local_frame: query dimension mismatch");
    const int D = set.ambient_dim();
    const int d = set.intrinsic_dim();

    const auto nearest = set.index().knn_search(r, 1);
    Vector q = set.point(nearest.front().index);

    const Scalar step_tol = cfg.tol_frame * std::max(spec.h, r.norm());
    const Scalar roi_radius = cfg.roi_factor * spec.support_radius();

    Vector prev_delta;
    Scalar prev_step = 0;

    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        const Support sup = collect_support(set, q, spec, static_cast<Index>(d) + 1,
                                            cfg.support_expand, cfg.max_expansions);
        if (sup.rows.empty())
            throw EmptySupport("local_frame: no supported samples even after expansion");
        if (static_cast<Index>(sup.rows.size()) <= d)
            throw RankDeficient("local_frame: fewer supported samples than d + 1");

        Matrix cov = Matrix::Zero(D, D);
        Vector q_weighted = Vector::Zero(D);
        Scalar weight_sum = 0;
        for (std::size_t s = 0; s < sup.rows.size(); ++s) {
            const Vector p = set.point(sup.rows[s]);
            const Scalar wi = sup.weights[static_cast<Index>(s)];
            const Vector centered = p - q;
            cov.noalias() += wi * centered * centered.transpose();
            q_weighted.noalias() += wi * p;
            weight_sum += wi;
        }
        q_weighted /= weight_sum;

        Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
        if (eig.info() != Eigen::Success)
            throw RankDeficient("local_frame: eigendecomposition failed");
        const Vector& evals = eig.eigenvalues();  // ascending
        if (!(evals[D - d] > 1e-12 * std::max(evals[D - 1], Scalar(0))))
            throw RankDeficient("local_frame: weighted covariance has rank below d");
        const Matrix basis = eig.eigenvectors().rightCols(d);

        Vector q_new = q_weighted + basis * (basis.transpose() * (r - q_weighted));
        if ((q_new - r).norm() > roi_radius)
            throw NoConvergence("local_frame: origin left the region of interest");

        Vector delta = q_new - q;
        const Scalar step = delta.norm();
        if (step <= step_tol) {
            LocalFrame frame;
            frame.q = q_new;
            frame.basis = basis;
            frame.anchor = r;
            frame.iterations = iter;
            return frame;
        }

        // Aitken extrapolation: near the fixed point the sweep contracts
        // linearly, so when consecutive steps are collinear jump along the
        // geometric tail. The stopping certificate stays a plain sweep step.
        if (prev_step > 0 && step < prev_step) {
            const Scalar rate = step / prev_step;
            const Scalar alignment = delta.dot(prev_delta) / (step * prev_step);
            if (rate > 0.3 && rate < 0.98 && alignment > 0.9)
                q_new += (rate / (1.0 - rate)) * delta;
        }
        prev_delta = std::move(delta);
        prev_step = step;
        q = std::move(q_new);
    }
    throw NoConvergence("local_frame: no fixed point within the iteration budget");
}

namespace {

VectorPoly fit_vector_poly_impl(const SampleSet& set, const LocalFrame& frame, int m,
                                const WeightSpec& spec, Index& support_count) {
    if (m < 0) throw std::invalid_argument("fit_vector_poly: negative degree");
    const int d = set.intrinsic_dim();
    const Index M = monomial_count(d, m);

    const FrameConfig defaults{};
    const Support sup = collect_support(set, frame.q, spec, M, defaults.support_expand,
                                        defaults.max_expansions);
    if (static_cast<Index>(sup.rows.size()) < M)
        throw InsufficientSupport("fit_vector_poly: supported samples below monomial count");
    support_count = static_cast<Index>(sup.rows.size());

    const Index rows = static_cast<Index>(sup.rows.size());
    const Scalar scale = spec.k * sup.h_eff;  // conditioning: fit in x / scale
    const auto exponents = monomial_exponents(d, m);

    Matrix design(rows, M);
    Matrix rhs(rows, set.ambient_dim());
    Vector basis_row(M);
    for (Index i = 0; i < rows; ++i) {
        const Vector p = set.point(sup.rows[static_cast<std::size_t>(i)]);
        const Vector local = frame.local(p) / scale;
        monomial_basis_into(exponents, m, local, basis_row);
        design.row(i) = basis_row.transpose();
        rhs.row(i) = p.transpose();
    }

    Matrix coeffs = weighted_least_squares(design, rhs, sup.weights);
    for (Index j = 0; j < M; ++j) {
        const auto& expo = exponents[static_cast<std::size_t>(j)];
        const int deg = std::accumulate(expo.begin(), expo.end(), 0);
        coeffs.row(j) /= std::pow(scale, deg);
    }

    VectorPoly poly;
    poly.degree = m;
    poly.dim = d;
    poly.coeffs = std::move(coeffs);
    return poly;
}

}  // namespace

VectorPoly fit_vector_poly(const SampleSet& set, const LocalFrame& frame, int m,
                           const WeightSpec& spec) {
    Index ignored = 0;
    return fit_vector_poly_impl(set, frame, m, spec, ignored);
}

Projection mmls_project(const SampleSet& set, const ConstVectorRef& r, const WeightSpec& spec,
                        int m, const FrameConfig& cfg) {
    Projection proj;
    proj.frame = local_frame(set, r, spec, cfg);
    proj.poly = fit_vector_poly_impl(set, proj.frame, m, spec, proj.support_count);
    proj.point = proj.poly.at_origin();
    return proj;
}

Matrix poly_jacobian_origin(const VectorPoly& poly) {
    if (poly.degree < 1)
        throw std::invalid_argument("poly_jacobian_origin: degree must be at least 1");
    // graded-lex puts the d linear monomials right after the constant
    return poly.coeffs.middleRows(1, poly.dim).transpose();
}

}  // namespace mmlsro
