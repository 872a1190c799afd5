#include "mmlsro/bench.hpp"

#include "mmlsro/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>

namespace mmlsro {

namespace {

Matrix sphere_matrix() {
    Matrix a(3, 3);
    a << 1.64, 0.9, 0.71,
         0.9, 0.82, 0.33,
         0.71, 0.33, 0.7;
    return a;
}

Matrix stiefel3_matrix() {
    Matrix a(3, 3);
    a << 0.23, 0.35, 0.39,
         0.35, 1.33, 1.06,
         0.39, 1.06, 1.27;
    return a;
}

Matrix stiefel4_matrix() {
    Matrix a(4, 4);
    a << 2.77, 2.4, 1.49, 2.15,
         2.4, 2.66, 1.18, 2.12,
         1.49, 1.18, 1.51, 1.92,
         2.15, 2.12, 1.92, 3.13;
    return a;
}

Matrix fixed_rank_matrix() {
    Matrix a(2, 2);
    a << -0.13, -0.24,
         -0.49, 0.11;
    return a;
}

// The PCA data matrix is "randomly generated"; fixed here as a seeded
// standard Gaussian so every run scores against the same oracle.
constexpr std::uint64_t kPcaDataSeed = 163;

const Matrix& pca_matrix() {
    static const Matrix a3 = [] {
        Rng rng(kPcaDataSeed);
        return rng.normal_matrix(200, 3);
    }();
    return a3;
}

Eigen::Map<const Matrix> reshape(const Vector& x, Index rows, Index cols) {
    return Eigen::Map<const Matrix>(x.data(), rows, cols);
}

Vector flatten(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

// trace cost for the 2-column eigenvalue problems
BenchProblem stiefel_trace_problem(std::string name, const Matrix& a, Index rows,
                                   Index default_n, int degree, Scalar noise) {
    BenchProblem p;
    p.name = std::move(name);
    p.kind = ManifoldKind::stiefel;
    p.shape_params = {static_cast<int>(rows), 2};
    p.ambient_dim = static_cast<int>(rows * 2);
    p.intrinsic_dim = static_cast<int>(rows * 2 - 3);
    p.default_n = default_n;
    p.default_degree = degree;
    p.default_noise = noise;
    p.cost = [a, rows](const Vector& x) {
        const auto X = reshape(x, rows, 2);
        return -(X.transpose() * a * X).trace();
    };
    p.euclid_grad = [a, rows](const Vector& x) {
        const auto X = reshape(x, rows, 2);
        return flatten(-2.0 * a * X);
    };
    return p;
}

std::map<std::string, BenchProblem> build_registry() {
    std::map<std::string, BenchProblem> registry;

    {
        BenchProblem p;
        p.name = "prelim";
        p.kind = ManifoldKind::prelim_surface;
        p.shape_params = {};
        p.ambient_dim = 100;
        p.intrinsic_dim = 2;
        p.default_n = 50000;
        p.default_degree = 1;
        p.default_noise = 1e-3;
        p.cost = [](const Vector& x) {
            return std::sin(2.0 * M_PI * x[0]) + 4.0 * x[1] * x[1] + x[0];
        };
        p.euclid_grad = [](const Vector& x) {
            Vector g = Vector::Zero(x.size());
            g[0] = 2.0 * M_PI * std::cos(2.0 * M_PI * x[0]) + 1.0;
            g[1] = 8.0 * x[1];
            return g;
        };
        registry[p.name] = p;
    }
    {
        BenchProblem p;
        p.name = "sphere_eig";
        p.kind = ManifoldKind::sphere;
        p.shape_params = {3};
        p.ambient_dim = 3;
        p.intrinsic_dim = 2;
        p.default_n = 40000;
        p.default_degree = 3;
        p.default_noise = 1e-4;
        const Matrix a = sphere_matrix();
        p.cost = [a](const Vector& x) { return -x.dot(a * x); };
        p.euclid_grad = [a](const Vector& x) { return Vector(-2.0 * a * x); };
        registry[p.name] = p;
    }
    registry["stiefel_eig3"] =
        stiefel_trace_problem("stiefel_eig3", stiefel3_matrix(), 3, 42875, 3, 1e-3);
    registry["stiefel_eig4"] =
        stiefel_trace_problem("stiefel_eig4", stiefel4_matrix(), 4, 100000, 4, 1e-4);
    {
        BenchProblem p;
        p.name = "stiefel_pca";
        p.kind = ManifoldKind::stiefel;
        p.shape_params = {3, 2};
        p.ambient_dim = 6;
        p.intrinsic_dim = 3;
        p.default_n = 42875;
        p.default_degree = 6;
        p.default_noise = 1e-4;
        const Matrix b = pca_matrix().transpose() * pca_matrix();  // 3 x 3 Gram
        p.cost = [b](const Vector& x) {
            const auto X = reshape(x, 3, 2);
            const Matrix s = X.transpose() * X;
            return b.trace() - 2.0 * (b * X * X.transpose()).trace() +
                   (b * X * s * X.transpose()).trace();
        };
        p.euclid_grad = [b](const Vector& x) {
            const auto X = reshape(x, 3, 2);
            const Matrix s = X.transpose() * X;
            const Matrix g = -4.0 * b * X + 2.0 * b * X * s + 2.0 * X * (X.transpose() * b * X);
            return flatten(g);
        };
        registry[p.name] = p;
    }
    {
        BenchProblem p;
        p.name = "fixed_rank";
        p.kind = ManifoldKind::fixed_rank;
        p.shape_params = {2, 2, 1};
        p.ambient_dim = 4;
        p.intrinsic_dim = 3;
        p.default_n = 100000;
        p.default_degree = 12;
        p.default_noise = 1e-4;
        const Vector target = flatten(fixed_rank_matrix());
        p.cost = [target](const Vector& x) { return (x - target).squaredNorm(); };
        p.euclid_grad = [target](const Vector& x) { return Vector(2.0 * (x - target)); };
        registry[p.name] = p;
    }
    return registry;
}

const std::map<std::string, BenchProblem>& registry() {
    static const std::map<std::string, BenchProblem> reg = build_registry();
    return reg;
}

}  // namespace

const std::vector<std::string>& problem_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, _] : registry()) out.push_back(name);
        return out;
    }();
    return names;
}

BenchProblem make_problem(const std::string& name) {
    const auto it = registry().find(name);
    if (it == registry().end())
        throw std::invalid_argument("make_problem: unknown problem '" + name + "'");
    return it->second;
}

std::string metric_name(const std::string& name) {
    if (name == "prelim") return "cost";
    if (name == "sphere_eig" || name == "stiefel_eig3" || name == "stiefel_eig4")
        return "suboptimality";
    return "relative_frobenius_error";
}

Scalar compute_metric(const std::string& name, const ConstVectorRef& x) {
    if (!x.allFinite()) throw std::invalid_argument("compute_metric: non-finite point");
    const Vector point = x;
    if (name == "prelim") return make_problem(name).cost(point);

    if (name == "sphere_eig") {
        const Matrix a = sphere_matrix();
        Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
        const Scalar top = eig.eigenvalues()[2];
        const Scalar value = point.dot(a * point);
        return std::abs(top - value) / top;
    }
    if (name == "stiefel_eig3" || name == "stiefel_eig4") {
        const Matrix a = name == "stiefel_eig3" ? stiefel3_matrix() : stiefel4_matrix();
        Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
        const Index dim = a.rows();
        const Scalar top2 = eig.eigenvalues()[dim - 1] + eig.eigenvalues()[dim - 2];
        const auto X = reshape(point, dim, 2);
        const Scalar value = (X.transpose() * a * X).trace();
        return std::abs(top2 - value) / top2;
    }
    if (name == "stiefel_pca") {
        Eigen::JacobiSVD<Matrix> svd(pca_matrix(), Eigen::ComputeThinV);
        const Matrix v = svd.matrixV().leftCols(2);
        const auto X = reshape(point, 3, 2);
        const Matrix vvt = v * v.transpose();
        return (vvt - X * X.transpose()).norm() / vvt.norm();
    }
    if (name == "fixed_rank") {
        Eigen::JacobiSVD<Matrix> svd(fixed_rank_matrix(),
                                     Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Matrix truncated = svd.singularValues()[0] * svd.matrixU().col(0) *
                                 svd.matrixV().col(0).transpose();
        const auto X = reshape(point, 2, 2);
        return (X - truncated).norm() / truncated.norm();
    }
    throw std::invalid_argument("compute_metric: unknown problem '" + name + "'");
}

ExperimentConfig resolve_defaults(ExperimentConfig config) {
    const BenchProblem problem = make_problem(config.problem);
    if (config.n <= 0) config.n = problem.default_n;
    if (config.degree < 0) config.degree = problem.default_degree;
    if (config.noise_points < 0) config.noise_points = problem.default_noise;
    if (config.noise_values < 0) config.noise_values = problem.default_noise;
    if (config.solver != "gd" && config.solver != "cg")
        throw std::invalid_argument("ExperimentConfig: solver must be gd or cg");
    return config;
}

Report run_experiment(const ExperimentConfig& raw) {
    const ExperimentConfig config = resolve_defaults(raw);
    const BenchProblem problem = make_problem(config.problem);

    SampleSet clean = sample_manifold(problem.kind, problem.shape_params, config.n, config.seed);
    Vector values(clean.size());
    for (Index i = 0; i < clean.size(); ++i) values[i] = problem.cost(clean.point(i));
    SampleSet with_values(clean.points(), values, clean.intrinsic_dim(), clean.kind());

    // cost samples are taken on the clean cloud; each noise target gets its
    // own stream
    SampleSet noisy = add_noise(with_values, config.noise_points, config.seed * 2 + 1,
                                NoiseTarget::points);
    noisy = add_noise(noisy, config.noise_values, config.seed * 2 + 2, NoiseTarget::values);

    auto set = std::make_shared<const SampleSet>(std::move(noisy));

    Problem prob;
    prob.set = set;
    prob.mode = config.mode;
    prob.cost = problem.cost;
    prob.euclid_grad = problem.euclid_grad;
    prob.geometry =
        make_geometry_config(*set, config.degree, config.weight_k, config.h_override);
    prob.geometry.step_guard = config.step_guard;

    Rng start_rng(config.seed ^ 0x9e3779b97f4a7c15ull);
    const Index start = static_cast<Index>(start_rng.index(static_cast<std::uint64_t>(set->size())));
    const Vector x0 = set->point(start);

    SolverOptions opts = config.options;
    opts.seed = config.seed;
    opts.record_points = true;

    Report report;
    report.config = config;
    report.metric = metric_name(config.problem);
    report.h_used = prob.geometry.weights.h;
    try {
        report.trace = config.solver == "cg" ? conjugate_gradient(prob, x0, opts)
                                             : gradient_descent(prob, x0, opts);
        report.final_point = report.trace.points.back();
    } catch (const InitialProjectionFailure&) {
        report.trace.reason = StopReason::mmls_failure;
        report.final_point = x0;
    }
    report.iterations = static_cast<long>(report.trace.rows.size()) - 1;
    if (report.iterations < 0) report.iterations = 0;
    report.final_metric = compute_metric(config.problem, report.final_point);

    if (!config.out_dir.empty()) {
        std::filesystem::create_directories(config.out_dir);
        write_trace_csv(report.trace, config.out_dir + "/trace.csv");
        write_report_json(report, config.out_dir + "/report.json");
    }
    return report;
}

void write_report_json(const Report& report, const std::string& path) {
    nlohmann::json j;
    j["config"] = {
        {"problem", report.config.problem},
        {"n", report.config.n},
        {"degree", report.config.degree},
        {"noise_points", report.config.noise_points},
        {"noise_values", report.config.noise_values},
        {"seed", report.config.seed},
        {"solver", report.config.solver},
        {"mode", report.config.mode == CostMode::explicit_gradient ? "explicit" : "sampled"},
        {"weight_k", report.config.weight_k},
        {"h", report.h_used},
        {"grad_tol", report.config.options.grad_tol},
        {"step_tol", report.config.options.step_tol},
        {"max_iters", report.config.options.max_iters},
        {"armijo_delta", report.config.options.armijo_delta},
        {"shrink_gamma", report.config.options.shrink_gamma},
        {"alpha_bar", report.config.options.alpha_bar},
        {"beta_rule", to_string(report.config.options.beta_rule)},
    };
    j["terminated"] = to_string(report.trace.reason);
    j["metric"] = report.metric;
    j["final_metric"] = report.final_metric;
    j["totals"] = {
        {"iterations", report.iterations},
        {"cost_evals", report.trace.cost_evals},
        {"projections", report.trace.projections},
    };
    if (!report.trace.rows.empty()) {
        j["final_cost"] = report.trace.final_row().cost;
        j["final_grad_norm"] = report.trace.final_row().grad_norm;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_report_json: cannot open " + path);
    out << j.dump(2) << "\n";
}

std::vector<ExperimentConfig> make_suite(const std::string& suite, std::uint64_t seed,
                                         const std::string& out_dir) {
    const bool smoke = suite == "smoke";
    if (!smoke && suite != "paper")
        throw std::invalid_argument("make_suite: suite must be paper or smoke");

    const std::map<std::string, Index> smoke_n = {
        {"prelim", 8000},       {"sphere_eig", 4000},  {"stiefel_eig3", 6000},
        {"stiefel_eig4", 20000}, {"stiefel_pca", 8000}, {"fixed_rank", 20000},
    };

    std::vector<ExperimentConfig> configs;
    for (const auto& name : problem_names()) {
        for (const CostMode mode : {CostMode::explicit_gradient, CostMode::sampled}) {
            if (smoke && mode == CostMode::sampled) continue;
            ExperimentConfig config;
            config.problem = name;
            config.seed = seed;
            config.mode = mode;
            config.solver = "gd";
            if (smoke) {
                config.n = smoke_n.at(name);
                config.noise_points = 0;  // CI sanity runs are clean
                config.noise_values = 0;
            }
            if (!out_dir.empty())
                config.out_dir = out_dir + "/" + name + "_gd_" +
                                 (mode == CostMode::explicit_gradient ? "explicit" : "sampled");
            configs.push_back(std::move(config));
        }
    }
    return configs;
}

std::vector<Report> run_suite(const std::vector<ExperimentConfig>& configs) {
    std::vector<std::future<Report>> futures;
    futures.reserve(configs.size());
    for (const auto& config : configs)
        futures.push_back(std::async(std::launch::async, [config] { return run_experiment(config); }));
    std::vector<Report> reports;
    reports.reserve(configs.size());
    for (auto& f : futures) reports.push_back(f.get());
    return reports;
}

}  // namespace mmlsro
