#include "mmlsro/optimize.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace mmlsro {

std::string to_string(StopReason reason) {
    switch (reason) {
        case StopReason::grad_tol: return "grad_tol";
        case StopReason::step_tol: return "step_tol";
        case StopReason::max_iters: return "max_iters";
        case StopReason::mmls_failure: return "mmls_failure";
    }
    return "max_iters";
}

std::string to_string(BetaRule rule) {
    switch (rule) {
        case BetaRule::fletcher_reeves: return "fr";
        case BetaRule::polak_ribiere_plus: return "prp";
        case BetaRule::none: return "none";
    }
    return "prp";
}

void Problem::validate() const {
    if (!set) throw std::invalid_argument("Problem: no sample set");
    if (mode == CostMode::explicit_gradient) {
        if (!cost || !euclid_grad)
            throw std::invalid_argument("Problem: explicit mode needs cost and euclid_grad");
    } else if (!set->has_values()) {
        throw std::invalid_argument("Problem: sampled mode needs cost samples on the cloud");
    }
}

void SolverOptions::validate() const {
    if (grad_tol <= 0 || step_tol <= 0 || max_iters < 1)
        throw std::invalid_argument("SolverOptions: bad tolerances");
    if (armijo_delta <= 0 || armijo_delta >= 0.25)
        throw std::invalid_argument("SolverOptions: armijo delta must lie in (0, 0.25)");
    if (shrink_gamma <= 0 || shrink_gamma >= 1)
        throw std::invalid_argument("SolverOptions: shrink gamma must lie in (0, 1)");
    if (alpha_bar <= 0) throw std::invalid_argument("SolverOptions: alpha_bar must be positive");
}

void write_trace_csv(const Trace& trace, std::ostream& out) {
    out << "iter,cost,grad_norm,step_size,backtracks,wall_seconds\n";
    char buf[224];
    for (const auto& row : trace.rows) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%d,%.6f\n", row.iter, row.cost,
                      row.grad_norm, row.step_size, row.backtracks, row.wall_seconds);
        out << buf;
    }
    out << "# terminated=" << to_string(trace.reason) << "\n";
}

void write_trace_csv(const Trace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path);
    write_trace_csv(trace, out);
}

namespace {

// Working state at one iterate: the point, its projection, tangent basis,
// cost, and approximate Riemannian gradient.
struct IterState {
    Vector x;
    Projection proj;
    TangentBasis basis;
    Scalar cost = 0;
    Vector rgrad;
};

struct RunCounters {
    long cost_evals = 0;
    long projections = 0;
};

Scalar trial_cost(const Problem& problem, const Projection& proj,
                  std::optional<ScalarPoly>& fit_out, RunCounters& counters) {
    ++counters.cost_evals;
    if (problem.mode == CostMode::explicit_gradient) return problem.cost(proj.point);
    ScalarPoly fit = fit_scalar_poly(*problem.set, proj.frame, problem.geometry.degree,
                                     problem.geometry.weights);
    const Scalar value = approx_value(fit);
    fit_out = std::move(fit);
    return value;
}

IterState make_state(const Problem& problem, Projection proj,
                     std::optional<ScalarPoly> cost_fit, std::optional<Scalar> known_cost,
                     RunCounters& counters) {
    IterState state;
    state.x = proj.point;
    state.basis = tangent_basis(proj);
    if (problem.mode == CostMode::explicit_gradient) {
        state.cost = known_cost ? *known_cost : (++counters.cost_evals, problem.cost(state.x));
        state.rgrad = approx_riemannian_grad(state.basis, problem.euclid_grad(state.x));
    } else {
        if (!cost_fit) {
            ++counters.cost_evals;
            cost_fit = fit_scalar_poly(*problem.set, proj.frame, problem.geometry.degree,
                                       problem.geometry.weights);
        }
        const auto [value, intrinsic] = approx_value_and_grad(*cost_fit);
        state.cost = value;
        state.rgrad = approx_riemannian_grad_sampled(state.basis, intrinsic);
    }
    state.proj = std::move(proj);
    return state;
}

ArmijoResult line_search(const Problem& problem, const IterState& state, const Vector& dir,
                         const SolverOptions& opts, RunCounters& counters) {
    const Scalar gnorm2 = state.rgrad.squaredNorm();
    const Scalar dir_norm = dir.norm();
    if (!(dir_norm > 0)) throw NonDescentDirection("line_search: zero direction");
    if (dir.dot(state.rgrad) >= 0)
        throw NonDescentDirection("line_search: direction does not descend");

    const bool fixed_mode = opts.fixed_step > 0;
    const Scalar start = fixed_mode ? opts.fixed_step : opts.alpha_bar;
    Scalar alpha = std::min(start, problem.geometry.Q() / dir_norm);

    int backtracks = 0;
    while (alpha >= opts.step_tol) {
        try {
            ++counters.projections;
            Projection proj = retract(*problem.set, state.x, alpha * dir, problem.geometry);
            std::optional<ScalarPoly> fit;
            const Scalar cost_at_trial = trial_cost(problem, proj, fit, counters);
            const bool accepted =
                fixed_mode || state.cost - cost_at_trial >= opts.armijo_delta * alpha * gnorm2;
            if (accepted) {
                ArmijoResult result;
                result.alpha = alpha;
                result.new_point = proj.point;
                result.new_cost = cost_at_trial;
                result.backtracks = backtracks;
                result.projection = std::move(proj);
                result.cost_fit = std::move(fit);
                return result;
            }
        } catch (const MmlsError&) {
            // retraction failed: treat like a failed decrease test
        }
        alpha *= opts.shrink_gamma;
        ++backtracks;
    }
    throw StepTooSmall("line_search: step shrank below step_tol");
}

enum class SolverKind { gradient_descent, conjugate_gradient };

Trace run_solver(const Problem& problem, const ConstVectorRef& x0, const SolverOptions& opts,
                 SolverKind kind) {
    problem.validate();
    opts.validate();

    Trace trace;
    RunCounters counters;
    const auto start_time = std::chrono::steady_clock::now();
    auto elapsed = [&]() {
        return std::chrono::duration<Scalar>(std::chrono::steady_clock::now() - start_time)
            .count();
    };
    auto push_row = [&](int iter, const IterState& state, Scalar grad_norm, Scalar step,
                        int backtracks) {
        trace.rows.push_back({iter, state.cost, grad_norm, step, backtracks, elapsed()});
        if (opts.record_points) trace.points.push_back(state.x);
    };

    IterState state = [&]() {
        try {
            ++counters.projections;
            Projection proj = mmls_project(*problem.set, x0, problem.geometry.weights,
                                           problem.geometry.degree, problem.geometry.frame);
            return make_state(problem, std::move(proj), std::nullopt, std::nullopt, counters);
        } catch (const MmlsError& err) {
            throw InitialProjectionFailure(std::string("initial projection failed: ") +
                                           err.what());
        }
    }();

    Vector cg_dir = -state.rgrad;

    int iter = 0;
    while (true) {
        const Scalar grad_norm = state.rgrad.norm();
        if (grad_norm <= opts.grad_tol) {
            push_row(iter, state, grad_norm, 0, 0);
            trace.reason = StopReason::grad_tol;
            break;
        }
        if (iter >= opts.max_iters) {
            push_row(iter, state, grad_norm, 0, 0);
            trace.reason = StopReason::max_iters;
            break;
        }

        Vector dir = kind == SolverKind::gradient_descent ? Vector(-state.rgrad) : cg_dir;
        if (kind == SolverKind::conjugate_gradient && dir.dot(state.rgrad) >= 0)
            dir = -state.rgrad;  // restart on a non-descent direction

        ArmijoResult ls;
        try {
            ls = line_search(problem, state, dir, opts, counters);
        } catch (const StepTooSmall&) {
            push_row(iter, state, grad_norm, 0, 0);
            trace.reason = StopReason::step_tol;
            break;
        } catch (const MmlsError&) {
            push_row(iter, state, grad_norm, 0, 0);
            trace.reason = StopReason::mmls_failure;
            break;
        }
        push_row(iter, state, grad_norm, ls.alpha, ls.backtracks);

        IterState next;
        try {
            next = make_state(problem, std::move(ls.projection), std::move(ls.cost_fit),
                              ls.new_cost, counters);
        } catch (const MmlsError&) {
            state.x = ls.new_point;
            state.cost = ls.new_cost;
            push_row(iter + 1, state, std::numeric_limits<Scalar>::quiet_NaN(), 0, 0);
            trace.reason = StopReason::mmls_failure;
            break;
        }

        if (kind == SolverKind::conjugate_gradient) {
            const Vector transported_dir = orth_project(next.basis, dir);
            Scalar beta = 0;
            const Scalar denom = state.rgrad.squaredNorm();
            switch (opts.beta_rule) {
                case BetaRule::fletcher_reeves:
                    beta = next.rgrad.squaredNorm() / denom;
                    break;
                case BetaRule::polak_ribiere_plus: {
                    const Vector transported_grad = orth_project(next.basis, state.rgrad);
                    beta = std::max<Scalar>(
                        0, next.rgrad.dot(next.rgrad - transported_grad) / denom);
                    break;
                }
                case BetaRule::none:
                    beta = 0;
                    break;
            }
            cg_dir = -next.rgrad + beta * transported_dir;
        }

        state = std::move(next);
        ++iter;
    }

    trace.cost_evals = counters.cost_evals;
    trace.projections = counters.projections;
    return trace;
}

}  // namespace

std::pair<Scalar, Vector> eval_cost_and_grad(const Problem& problem, const ConstVectorRef& r,
                                             const Projection& projection) {
    problem.validate();
    const TangentBasis basis = tangent_basis(projection);
    if (problem.mode == CostMode::explicit_gradient) {
        const Vector at = r;
        return {problem.cost(at), approx_riemannian_grad(basis, problem.euclid_grad(at))};
    }
    const ScalarPoly fit = fit_scalar_poly(*problem.set, projection.frame,
                                           problem.geometry.degree, problem.geometry.weights);
    const auto [value, intrinsic] = approx_value_and_grad(fit);
    return {value, approx_riemannian_grad_sampled(basis, intrinsic)};
}

ArmijoResult armijo_backtracking(const Problem& problem, const ConstVectorRef& r,
                                 const ConstVectorRef& rgrad, const Projection& projection,
                                 const SolverOptions& opts, const Vector* direction) {
    problem.validate();
    opts.validate();
    if (!(rgrad.norm() > 0)) throw std::invalid_argument("armijo_backtracking: zero gradient");

    RunCounters counters;
    IterState state;
    state.x = r;
    state.proj = projection;
    state.basis = tangent_basis(projection);
    state.rgrad = rgrad;
    std::optional<ScalarPoly> fit;
    state.cost = trial_cost(problem, projection, fit, counters);

    const Vector dir = direction ? *direction : Vector(-rgrad);
    return line_search(problem, state, dir, opts, counters);
}

Trace gradient_descent(const Problem& problem, const ConstVectorRef& x0,
                       const SolverOptions& opts) {
    return run_solver(problem, x0, opts, SolverKind::gradient_descent);
}

Trace conjugate_gradient(const Problem& problem, const ConstVectorRef& x0,
                         const SolverOptions& opts) {
    return run_solver(problem, x0, opts, SolverKind::conjugate_gradient);
}

}  // namespace mmlsro
