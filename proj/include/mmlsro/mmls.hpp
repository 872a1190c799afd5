#pragma once

#include "mmlsro/point_cloud.hpp"
#include "mmlsro/types.hpp"
#include "mmlsro/weights.hpp"

namespace mmlsro {

/// Controls for the local-frame fixed-point iteration.
struct FrameConfig {
    Scalar tol_frame = 1e-10;    ///< step tolerance, scaled by max(h, ||r||)
    int max_iters = 100;
    Scalar roi_factor = 3.0;     ///< abort when ||q - r|| exceeds roi_factor * k * h
    Scalar support_expand = 1.3; ///< per-expansion growth of the weight's h
    int max_expansions = 3;
};

/// Local affine coordinate system at a query point: origin q plus an
/// orthonormal basis of the d-dimensional coordinate space, with
/// anchor - q orthogonal to the basis.
struct LocalFrame {
    Vector q;       ///< frame origin
    Matrix basis;   ///< D x d, orthonormal columns
    Vector anchor;  ///< query point the frame was solved for
    int iterations = 0;

    /// Local coordinates of an ambient point: basis^T (p - q).
    Vector local(const ConstVectorRef& p) const { return basis.transpose() * (p - q); }
};

/// Total-degree-m polynomial map R^d -> R^D. Row j of coeffs is the ambient
/// coefficient vector of monomial j in graded-lex order, constant first.
struct VectorPoly {
    int degree = 0;
    int dim = 0;
    Matrix coeffs;  // M x D

    Vector eval(const ConstVectorRef& x) const;
    Vector at_origin() const { return coeffs.row(0).transpose(); }
};

/// Result of the two-step projection.
struct Projection {
    Vector point;  ///< fitted polynomial evaluated at the frame origin
    LocalFrame frame;
    VectorPoly poly;
    Index support_count = 0;  ///< samples with positive weight in the fit
};

/// Step 1: alternating solve for the weighted local frame at r. The origin is
/// initialized at the nearest sample (lowest index on ties); each sweep takes
/// the top-d eigenvectors of the weighted second moment about q and re-anchors
/// q below r. Throws EmptySupport, RankDeficient, or NoConvergence.
LocalFrame local_frame(const SampleSet& set, const ConstVectorRef& r, const WeightSpec& spec,
                       const FrameConfig& cfg = {});

/// Step 2: weighted least-squares fit of ambient samples over the frame's
/// local coordinates, one shared design matrix with D right-hand sides.
/// Expands the weight's h (by cfg-style factors 1.3, up to 3 times) when the
/// supported sample count is below the number of monomials.
VectorPoly fit_vector_poly(const SampleSet& set, const LocalFrame& frame, int m,
                           const WeightSpec& spec);

/// Both steps; point = fitted polynomial at the origin.
Projection mmls_project(const SampleSet& set, const ConstVectorRef& r, const WeightSpec& spec,
                        int m, const FrameConfig& cfg = {});

/// D x d differential of the polynomial at the frame origin, read off the
/// degree-1 coefficient rows (ambient coordinates). Requires m >= 1.
Matrix poly_jacobian_origin(const VectorPoly& poly);

}  // namespace mmlsro
