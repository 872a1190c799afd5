#pragma once

#include "mmlsro/func_approx.hpp"
#include "mmlsro/mmls.hpp"

namespace mmlsro {

/// Basis of the approximate tangent space: the columns of the polynomial
/// differential at the frame origin. Columns are not orthonormalized; the
/// cached Gram factorization absorbs the skew.
class TangentBasis {
public:
    TangentBasis() = default;  ///< empty; assign before use

    /// Validates full column rank (smallest singular value above
    /// 1e-10 x largest) and factorizes the Gram matrix by Cholesky, with a
    /// ridge fallback of 1e-14 * trace / d. Throws RankDeficient or
    /// IllConditioned.
    explicit TangentBasis(Matrix basis);

    const Matrix& matrix() const { return basis_; }
    Index ambient_dim() const { return basis_.rows(); }
    Index dim() const { return basis_.cols(); }

    /// Solve G_B y = rhs against the cached factorization.
    Vector gram_solve(const ConstVectorRef& rhs) const;

    /// Orthonormalized copy of the columns, for diagnostics only.
    Matrix orthonormalized() const;

private:
    Matrix basis_;
    Eigen::LLT<Matrix> gram_factor_;
};

/// Everything the approximate Riemannian toolbox needs per cloud.
struct GeometryConfig {
    int degree = 3;          ///< polynomial degree of the projections
    WeightSpec weights{};    ///< weight family (k, h)
    FrameConfig frame{};     ///< step-1 iteration controls
    Scalar step_guard = 0;   ///< Q: max tangent-step length; 0 = 1 * k * h

    Scalar Q() const { return step_guard > 0 ? step_guard : weights.support_radius(); }
};

/// Build a GeometryConfig with h estimated from the cloud (or taken from
/// h_override when positive).
GeometryConfig make_geometry_config(const SampleSet& set, int degree, Scalar weight_k = 1.5,
                                    Scalar h_override = 0);

/// Tangent basis of a projection: the polynomial differential at the origin.
TangentBasis tangent_basis(const Projection& projection);

/// Orthogonal projection of v onto the basis range: B G_B^{-1} B^T v.
Vector orth_project(const TangentBasis& basis, const ConstVectorRef& v);

/// Approximate Riemannian gradient from a known Euclidean gradient.
Vector approx_riemannian_grad(const TangentBasis& basis, const ConstVectorRef& euclid_grad);

/// Approximate Riemannian gradient from the intrinsic gradient of a fitted
/// cost polynomial (frame coordinates): B G_B^{-1} g.
Vector approx_riemannian_grad_sampled(const TangentBasis& basis,
                                      const ConstVectorRef& intrinsic_grad);

/// Approximate retraction: project r + xi back onto the approximating
/// manifold. Callers keep ||xi|| within cfg.Q(); a projection failure is the
/// caller's signal that the step was too large.
Projection retract(const SampleSet& set, const ConstVectorRef& r, const ConstVectorRef& xi,
                   const GeometryConfig& cfg);

struct TransportResult {
    Vector new_point;
    Vector transported;
    Projection projection;  ///< projection at r + eta (frame of new_point)
};

/// Approximate vector transport: retract eta, then orthogonally project xi
/// onto the tangent basis at the landed point.
TransportResult vector_transport(const SampleSet& set, const ConstVectorRef& r,
                                 const ConstVectorRef& eta, const ConstVectorRef& xi,
                                 const GeometryConfig& cfg);

}  // namespace mmlsro
