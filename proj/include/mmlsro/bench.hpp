#pragma once

#include "mmlsro/optimize.hpp"

#include <string>
#include <vector>

namespace mmlsro {

/// Registry entry for one benchmark problem: manifold, defaults, cost, and
/// Euclidean gradient. Matrix-manifold points are column-stacked vectors; the
/// cost callables reshape internally.
struct BenchProblem {
    std::string name;
    ManifoldKind kind = ManifoldKind::generic;
    std::vector<int> shape_params;
    int ambient_dim = 0;
    int intrinsic_dim = 0;
    Index default_n = 0;
    int default_degree = 0;
    Scalar default_noise = 0;  ///< Gaussian variance, applied to points and values
    std::function<Scalar(const Vector&)> cost;
    std::function<Vector(const Vector&)> euclid_grad;
};

/// Names in the registry: prelim, sphere_eig, stiefel_eig3, stiefel_eig4,
/// stiefel_pca, fixed_rank.
const std::vector<std::string>& problem_names();

/// Look up a problem. Throws std::invalid_argument on unknown names.
BenchProblem make_problem(const std::string& name);

/// Problem-specific quality metric at a point: relative suboptimality against
/// a dense eigendecomposition for the eigenvalue problems, relative Frobenius
/// error against an SVD oracle for PCA and low-rank, and the raw cost for
/// prelim.
Scalar compute_metric(const std::string& name, const ConstVectorRef& x);

std::string metric_name(const std::string& name);

/// One experiment: problem, overrides, solver selection, and output location.
struct ExperimentConfig {
    std::string problem;
    Index n = 0;               ///< 0 = registry default
    int degree = -1;           ///< -1 = registry default
    Scalar noise_points = -1;  ///< variance; negative = registry default
    Scalar noise_values = -1;  ///< variance; negative = registry default
    std::uint64_t seed = 0;
    std::string solver = "gd";  ///< gd | cg
    CostMode mode = CostMode::explicit_gradient;
    SolverOptions options{};
    Scalar weight_k = 1.5;
    Scalar h_override = 0;    ///< > 0 replaces the estimated fill distance
    Scalar step_guard = 0;    ///< > 0 replaces the default Q = k * h
    std::string out_dir;      ///< empty = no files written
};

/// Fill registry defaults into unset fields.
ExperimentConfig resolve_defaults(ExperimentConfig config);

struct Report {
    ExperimentConfig config;  ///< resolved
    Trace trace;
    Scalar final_metric = 0;
    std::string metric;
    Vector final_point;
    Scalar h_used = 0;
    long iterations = 0;
};

/// Sample the manifold, evaluate the cost samples on the clean cloud, inject
/// noise, pick a seeded random start from the cloud, solve, and (when out_dir
/// is set) write trace.csv and report.json there.
Report run_experiment(const ExperimentConfig& config);

void write_report_json(const Report& report, const std::string& path);

/// The paper suite (all six experiments at registry defaults, explicit and
/// sampled modes) or a reduced smoke suite. Experiments run concurrently,
/// one isolated random stream each.
std::vector<ExperimentConfig> make_suite(const std::string& suite, std::uint64_t seed,
                                         const std::string& out_dir);
std::vector<Report> run_suite(const std::vector<ExperimentConfig>& configs);

}  // namespace mmlsro
