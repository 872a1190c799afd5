#pragma once

#include "mmlsro/mmls.hpp"

namespace mmlsro {

/// Total-degree-m polynomial R^d -> R in graded-lex coefficients.
struct ScalarPoly {
    int degree = 0;
    int dim = 0;
    Vector coeffs;  // length C(d+m, m), constant first

    Scalar eval(const ConstVectorRef& x) const;
};

/// Weighted least-squares fit of the cost samples over a frame's local
/// coordinates; same solver and support-expansion contract as the vector fit.
/// Requires the cloud to carry values.
ScalarPoly fit_scalar_poly(const SampleSet& set, const LocalFrame& frame, int m,
                           const WeightSpec& spec);

/// Constant coefficient and degree-1 coefficients of the fit: the
/// approximate cost value and the intrinsic gradient at the frame origin
/// (frame coordinates). Requires m >= 1 for the gradient.
std::pair<Scalar, Vector> approx_value_and_grad(const ScalarPoly& poly);

/// The approximate cost value alone (valid for any degree).
Scalar approx_value(const ScalarPoly& poly);

}  // namespace mmlsro
