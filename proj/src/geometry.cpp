#include "mmlsro/geometry.hpp"

#include <cmath>

namespace mmlsro {

TangentBasis::TangentBasis(Matrix basis) : basis_(std::move(basis)) {
    if (basis_.rows() < basis_.cols() || basis_.cols() < 1)
        throw std::invalid_argument("TangentBasis: need a tall D x d matrix");

    Eigen::JacobiSVD<Matrix> svd(basis_);
    const Scalar s_max = svd.singularValues()[0];
    const Scalar s_min = svd.singularValues()[basis_.cols() - 1];
    if (!(s_min > 1e-10 * s_max))
        throw RankDeficient("TangentBasis: columns are numerically rank deficient");

    Matrix gram = basis_.transpose() * basis_;
    gram_factor_.compute(gram);
    if (gram_factor_.info() != Eigen::Success) {
        gram.diagonal().array() += 1e-14 * gram.trace() / static_cast<Scalar>(gram.rows());
        gram_factor_.compute(gram);
        if (gram_factor_.info() != Eigen::Success)
            throw IllConditioned("TangentBasis: Gram factorization failed after ridge");
    }
}

Vector TangentBasis::gram_solve(const ConstVectorRef& rhs) const {
    return gram_factor_.solve(rhs);
}

Matrix TangentBasis::orthonormalized() const {
    Eigen::HouseholderQR<Matrix> qr(basis_);
    return qr.householderQ() * Matrix::Identity(basis_.rows(), basis_.cols());
}

GeometryConfig make_geometry_config(const SampleSet& set, int degree, Scalar weight_k,
                                    Scalar h_override) {
    GeometryConfig cfg;
    cfg.degree = degree;
    cfg.weights.k = weight_k;
    cfg.weights.h = h_override > 0 ? h_override : estimate_fill_distance(set).h_est;
    return cfg;
}

TangentBasis tangent_basis(const Projection& projection) {
    return TangentBasis(poly_jacobian_origin(projection.poly));
}

Vector orth_project(const TangentBasis& basis, const ConstVectorRef& v) {
    return basis.matrix() * basis.gram_solve(basis.matrix().transpose() * v);
}

Vector approx_riemannian_grad(const TangentBasis& basis, const ConstVectorRef& euclid_grad) {
    return orth_project(basis, euclid_grad);
}

Vector approx_riemannian_grad_sampled(const TangentBasis& basis,
                                      const ConstVectorRef& intrinsic_grad) {
    if (intrinsic_grad.size() != basis.dim())
        throw std::invalid_argument("approx_riemannian_grad_sampled: gradient dimension mismatch");
    return basis.matrix() * basis.gram_solve(intrinsic_grad);
}

Projection retract(const SampleSet& set, const ConstVectorRef& r, const ConstVectorRef& xi,
                   const GeometryConfig& cfg) {
    return mmls_project(set, r + xi, cfg.weights, cfg.degree, cfg.frame);
}

TransportResult vector_transport(const SampleSet& set, const ConstVectorRef& r,
                                 const ConstVectorRef& eta, const ConstVectorRef& xi,
                                 const GeometryConfig& cfg) {
    TransportResult result;
    result.projection = retract(set, r, eta, cfg);
    result.new_point = result.projection.point;
    result.transported = orth_project(tangent_basis(result.projection), xi);
    return result;
}

}  // namespace mmlsro
