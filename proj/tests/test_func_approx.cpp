#include "mmlsro/func_approx.hpp"

#include "mmlsro/monomials.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace mmlsro;
using namespace testutil;

namespace {

SampleSet with_cost(const SampleSet& set, const std::function<Scalar(const Vector&)>& f) {
    Vector values(set.size());
    for (Index i = 0; i < set.size(); ++i) values[i] = f(set.point(i));
    return SampleSet(set.points(), values, set.intrinsic_dim(), set.kind());
}

}  // namespace

TEST_SUITE_BEGIN("func_approx");

TEST_CASE("constant cost fits to the constant") {
    const PlaneCloud plane = make_plane_cloud(4, 2, 400, 131);
    const SampleSet set = with_cost(plane.set, [](const Vector&) { return 3.25; });
    const WeightSpec spec{1.5, estimate_fill_distance(set).h_est};
    Vector t(2);
    t << 0.1, -0.2;
    const LocalFrame frame = local_frame(set, plane.embed(t), spec);
    const ScalarPoly poly = fit_scalar_poly(set, frame, 2, spec);
    CHECK(poly.coeffs[0] == doctest::Approx(3.25).epsilon(1e-10));
    for (Index j = 1; j < poly.coeffs.size(); ++j) CHECK(std::abs(poly.coeffs[j]) <= 1e-10);
    const auto [value, grad] = approx_value_and_grad(poly);
    CHECK(value == doctest::Approx(3.25).epsilon(1e-10));
    CHECK(grad.norm() <= 1e-9);
}

TEST_CASE("linear ambient cost on a plane evaluates exactly at the origin") {
    const PlaneCloud plane = make_plane_cloud(5, 2, 500, 137);
    Vector slope(5);
    slope << 1.0, -0.7, 0.3, 2.0, -1.1;
    const auto f = [&](const Vector& x) { return slope.dot(x) + 0.5; };
    const SampleSet set = with_cost(plane.set, f);
    const WeightSpec spec{1.5, estimate_fill_distance(set).h_est};
    Vector t(2);
    t << -0.3, 0.25;
    const Vector r = plane.embed(t);
    const LocalFrame frame = local_frame(set, r, spec);
    const ScalarPoly poly = fit_scalar_poly(set, frame, 1, spec);
    CHECK(approx_value(poly) == doctest::Approx(f(frame.q)).epsilon(1e-8));
}

TEST_CASE("value and gradient are coefficient read-offs") {
    ScalarPoly poly;
    poly.degree = 1;
    poly.dim = 2;
    poly.coeffs = Vector(3);
    poly.coeffs << 3.0, 2.0, -1.0;
    const auto [value, grad] = approx_value_and_grad(poly);
    CHECK(value == 3.0);
    CHECK(grad[0] == 2.0);
    CHECK(grad[1] == -1.0);

    ScalarPoly constant;
    constant.degree = 0;
    constant.dim = 2;
    constant.coeffs = Vector::Ones(1);
    CHECK(approx_value(constant) == 1.0);
    CHECK_THROWS_AS(approx_value_and_grad(constant), std::invalid_argument);
}

TEST_CASE("gradient read-off matches central differences of the fitted polynomial") {
    const SampleSet sphere = sample_manifold(ManifoldKind::sphere, {3}, 10000, 139);
    Matrix a(3, 3);
    a << 1.64, 0.9, 0.71,
         0.9, 0.82, 0.33,
         0.71, 0.33, 0.7;
    const SampleSet set =
        with_cost(sphere, [&](const Vector& x) { return x.dot(a * x); });
    const WeightSpec spec{1.5, estimate_fill_distance(set).h_est};

    const auto queries = unit_queries(3, 50, 141);
    for (const auto& p : queries) {
        const LocalFrame frame = local_frame(set, p, spec);
        const ScalarPoly poly = fit_scalar_poly(set, frame, 2, spec);
        const auto [value, grad] = approx_value_and_grad(poly);
        (void)value;
        const Scalar step = 1e-5;
        for (int j = 0; j < 2; ++j) {
            Vector plus = Vector::Zero(2), minus = Vector::Zero(2);
            plus[j] = step;
            minus[j] = -step;
            const Scalar fd = (poly.eval(plus) - poly.eval(minus)) / (2 * step);
            CHECK(grad[j] == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("chain-rule consistency on the sphere cost") {
    Matrix a(3, 3);
    a << 1.64, 0.9, 0.71,
         0.9, 0.82, 0.33,
         0.71, 0.33, 0.7;
    const auto queries = unit_queries(3, 20, 151);
    const int m = 3;

    // intrinsic gradient vs the analytic pullback gradient, halving h
    std::vector<Scalar> medians;
    for (const Index n : {10000, 40000}) {
        const SampleSet sphere =
            sample_manifold(ManifoldKind::sphere, {3}, n, 149 + static_cast<std::uint64_t>(n));
        const SampleSet set =
            with_cost(sphere, [&](const Vector& x) { return x.dot(a * x); });
        const WeightSpec spec{1.5, estimate_fill_distance(set).h_est};
        std::vector<Scalar> errs;
        for (const auto& p : queries) {
            const Projection proj = mmls_project(set, p, spec, m);
            const ScalarPoly poly = fit_scalar_poly(set, proj.frame, m, spec);
            const auto [value, intrinsic] = approx_value_and_grad(poly);
            (void)value;
            // d/dt f(phi(t)) at 0 = Dphi(0)^T grad f, with Dphi(0) = Dg*(0)
            const Matrix jac = poly_jacobian_origin(proj.poly);
            const Vector analytic = jac.transpose() * (2.0 * a * proj.point);
            errs.push_back((intrinsic - analytic).lpNorm<Eigen::Infinity>());
        }
        medians.push_back(median(errs));
    }
    CHECK(medians[1] < 5e-3);
    CHECK(medians[0] / medians[1] >= std::pow(2.0, m) * 0.5);
}

TEST_CASE("fitted value tracks the cost at the projected point, halving h") {
    Matrix a(3, 3);
    a << 1.64, 0.9, 0.71,
         0.9, 0.82, 0.33,
         0.71, 0.33, 0.7;
    const auto queries = unit_queries(3, 30, 153);
    const int m = 2;

    std::vector<Scalar> medians;
    for (const Index n : {2500, 10000}) {
        const SampleSet sphere =
            sample_manifold(ManifoldKind::sphere, {3}, n, 400 + static_cast<std::uint64_t>(n));
        const SampleSet set =
            with_cost(sphere, [&](const Vector& x) { return x.dot(a * x); });
        const WeightSpec spec{1.5, estimate_fill_distance(set).h_est};
        std::vector<Scalar> errs;
        for (const auto& p : queries) {
            const Projection proj = mmls_project(set, p, spec, m);
            const ScalarPoly poly = fit_scalar_poly(set, proj.frame, m, spec);
            errs.push_back(std::abs(approx_value(poly) - proj.point.dot(a * proj.point)));
        }
        medians.push_back(median(errs));
    }
    CHECK(medians[0] / medians[1] >= std::pow(2.0, m + 1) * 0.5);
}

TEST_CASE("uniqueness of the approximation along normals") {
    const SampleSet sphere = sample_manifold(ManifoldKind::sphere, {3}, 10000, 157);
    const SampleSet set = with_cost(sphere, [](const Vector& x) { return x[0] * x[0]; });
    const WeightSpec spec{1.5, estimate_fill_distance(set).h_est};
    const auto queries = unit_queries(3, 5, 159);
    for (const auto& p : queries) {
        const LocalFrame frame = local_frame(set, p, spec);
        const ScalarPoly base = fit_scalar_poly(set, frame, 2, spec);
        const Vector moved = frame.q + 1.4 * (p - frame.q);
        const LocalFrame frame2 = local_frame(set, moved, spec);
        const ScalarPoly other = fit_scalar_poly(set, frame2, 2, spec);
        CHECK(approx_value(base) == doctest::Approx(approx_value(other)).epsilon(1e-8));
    }
}

TEST_CASE("missing values rejected") {
    const SampleSet sphere = sample_manifold(ManifoldKind::sphere, {3}, 2000, 161);
    const WeightSpec spec{1.5, estimate_fill_distance(sphere).h_est};
    Vector p(3);
    p << 0, 0, 1;
    const LocalFrame frame = local_frame(sphere, p, spec);
    CHECK_THROWS_AS(fit_scalar_poly(sphere, frame, 1, spec), MissingValues);
}

TEST_SUITE_END();
