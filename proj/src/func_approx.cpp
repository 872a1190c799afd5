#include "mmlsro/func_approx.hpp"

#include "mmlsro/monomials.hpp"
#include "mmlsro/wls.hpp"
#include "support.hpp"

#include <numeric>

namespace mmlsro {

Scalar ScalarPoly::eval(const ConstVectorRef& x) const {
    return coeffs.dot(monomial_basis(degree, x));
}

ScalarPoly fit_scalar_poly(const SampleSet& set, const LocalFrame& frame, int m,
                           const WeightSpec& spec) {
    if (m < 0) throw std::invalid_argument("fit_scalar_poly: negative degree");
    if (!set.has_values()) throw MissingValues("fit_scalar_poly: cloud has no cost samples");
    const int d = set.intrinsic_dim();
    const Index M = monomial_count(d, m);

    const FrameConfig defaults{};
    const detail::Support sup = detail::collect_support(set, frame.q, spec, M,
                                                        defaults.support_expand,
                                                        defaults.max_expansions);
    if (static_cast<Index>(sup.rows.size()) < M)
        throw InsufficientSupport("fit_scalar_poly: supported samples below monomial count");

    const Index n_rows = static_cast<Index>(sup.rows.size());
    const Scalar scale = spec.k * sup.h_eff;
    const auto exponents = monomial_exponents(d, m);

    Matrix design(n_rows, M);
    Matrix rhs(n_rows, 1);
    Vector basis_row(M);
    for (Index i = 0; i < n_rows; ++i) {
        const Index sample = sup.rows[static_cast<std::size_t>(i)];
        const Vector local = frame.local(set.point(sample)) / scale;
        monomial_basis_into(exponents, m, local, basis_row);
        design.row(i) = basis_row.transpose();
        rhs(i, 0) = set.values()[sample];
    }

    Matrix coeffs = weighted_least_squares(design, rhs, sup.weights);
    for (Index j = 0; j < M; ++j) {
        const auto& expo = exponents[static_cast<std::size_t>(j)];
        const int deg = std::accumulate(expo.begin(), expo.end(), 0);
        coeffs(j, 0) /= std::pow(scale, deg);
    }

    ScalarPoly poly;
    poly.degree = m;
    poly.dim = d;
    poly.coeffs = coeffs.col(0);
    return poly;
}

std::pair<Scalar, Vector> approx_value_and_grad(const ScalarPoly& poly) {
    if (poly.degree < 1)
        throw std::invalid_argument("approx_value_and_grad: degree must be at least 1");
    return {poly.coeffs[0], poly.coeffs.segment(1, poly.dim)};
}

Scalar approx_value(const ScalarPoly& poly) { return poly.coeffs[0]; }

}  // namespace mmlsro
