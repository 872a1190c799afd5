#pragma once

#include "mmlsro/geometry.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mmlsro {

enum class CostMode {
    explicit_gradient,  ///< cost and Euclidean gradient are callables
    sampled             ///< cost known only through samples on the cloud
};

enum class BetaRule {
    fletcher_reeves,
    polak_ribiere_plus,
    none  ///< beta forced to zero; degenerates to gradient descent
};

enum class StopReason { grad_tol, step_tol, max_iters, mmls_failure };

std::string to_string(StopReason reason);
std::string to_string(BetaRule rule);

/// One optimization problem over a sampled manifold.
struct Problem {
    std::shared_ptr<const SampleSet> set;
    CostMode mode = CostMode::explicit_gradient;
    std::function<Scalar(const Vector&)> cost;         // explicit mode
    std::function<Vector(const Vector&)> euclid_grad;  // explicit mode
    GeometryConfig geometry;

    void validate() const;
};

struct SolverOptions {
    Scalar grad_tol = 0.005;
    Scalar step_tol = 1e-10;
    int max_iters = 1000;
    Scalar armijo_delta = 0.1;   ///< sufficient-decrease constant, in (0, 0.25)
    Scalar shrink_gamma = 0.5;   ///< backtracking shrink factor, in (0, 1)
    Scalar alpha_bar = 1.0;      ///< initial trial step scale
    Scalar fixed_step = 0;       ///< > 0 selects fixed-step mode (no decrease test)
    BetaRule beta_rule = BetaRule::polak_ribiere_plus;
    std::uint64_t seed = 0;      ///< echoed into reports; the solver itself is deterministic
    bool record_points = false;

    void validate() const;
};

struct TraceRow {
    int iter = 0;
    Scalar cost = 0;
    Scalar grad_norm = 0;
    Scalar step_size = 0;  ///< step taken from this iterate; 0 on the final row
    int backtracks = 0;
    Scalar wall_seconds = 0;  ///< cumulative since solve start
};

/// Per-iteration record of a solver run. The row list is empty only when the
/// very first projection failed.
struct Trace {
    std::vector<TraceRow> rows;
    StopReason reason = StopReason::max_iters;
    std::vector<Vector> points;  ///< one per row when record_points is set
    long cost_evals = 0;
    long projections = 0;

    const TraceRow& final_row() const {
        if (rows.empty()) throw std::logic_error("Trace::final_row: empty trace");
        return rows.back();
    }
};

/// Trace CSV: header "iter,cost,grad_norm,step_size,backtracks,wall_seconds",
/// one row per iteration, then a final comment "# terminated=<reason>".
void write_trace_csv(const Trace& trace, std::ostream& out);
void write_trace_csv(const Trace& trace, const std::string& path);

/// Cost and approximate Riemannian gradient at r, given the projection solved
/// at r. Explicit mode projects the Euclidean gradient; sampled mode fits the
/// cost samples over the projection's frame.
std::pair<Scalar, Vector> eval_cost_and_grad(const Problem& problem, const ConstVectorRef& r,
                                             const Projection& projection);

struct ArmijoResult {
    Scalar alpha = 0;
    Vector new_point;
    Scalar new_cost = 0;
    int backtracks = 0;
    Projection projection;              ///< projection solved at the accepted point
    std::optional<ScalarPoly> cost_fit; ///< sampled mode: the accepted point's cost fit
};

/// Backtracking line search with the sufficient-decrease test
///   f(x) - f(retract(alpha * dir)) >= delta * alpha * ||rgrad||^2,
/// starting from alpha = min(alpha_bar, Q / ||dir||). A retraction failure is
/// treated exactly like a failed decrease test: shrink and retry. Throws
/// StepTooSmall when alpha falls below step_tol and NonDescentDirection when
/// the supplied direction does not descend.
ArmijoResult armijo_backtracking(const Problem& problem, const ConstVectorRef& r,
                                 const ConstVectorRef& rgrad, const Projection& projection,
                                 const SolverOptions& opts,
                                 const Vector* direction = nullptr);

/// Riemannian gradient descent over the approximate components.
Trace gradient_descent(const Problem& problem, const ConstVectorRef& x0,
                       const SolverOptions& opts);

/// Riemannian conjugate gradient with orthogonal-projection vector transport.
/// Falls back to the steepest direction whenever the update stops descending.
Trace conjugate_gradient(const Problem& problem, const ConstVectorRef& x0,
                         const SolverOptions& opts);

}  // namespace mmlsro
