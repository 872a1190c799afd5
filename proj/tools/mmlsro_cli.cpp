// Command-line front end: sample benchmark clouds, project point batches,
// run single optimization experiments, or run the whole benchmark suite.

#include "mmlsro/bench.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

namespace {

using namespace mmlsro;

ManifoldKind parse_kind(const std::string& name) {
    if (name == "prelim_surface") return ManifoldKind::prelim_surface;
    if (name == "sphere") return ManifoldKind::sphere;
    if (name == "stiefel") return ManifoldKind::stiefel;
    if (name == "fixed_rank") return ManifoldKind::fixed_rank;
    throw CLI::ValidationError("--kind", "unknown manifold kind '" + name + "'");
}

std::vector<int> default_params(ManifoldKind kind) {
    switch (kind) {
        case ManifoldKind::sphere: return {3};
        case ManifoldKind::stiefel: return {3, 2};
        case ManifoldKind::fixed_rank: return {2, 2, 1};
        default: return {};
    }
}

int run_sample(const std::string& kind_name, long long n, std::uint64_t seed, double noise,
               const std::vector<int>& params, const std::string& out) {
    const ManifoldKind kind = parse_kind(kind_name);
    const std::vector<int> shape = params.empty() ? default_params(kind) : params;
    SampleSet set = sample_manifold(kind, shape, n, seed);
    if (noise > 0) set = add_noise(set, noise, seed * 2 + 1, NoiseTarget::points);
    write_cloud_csv(set, out);
    std::cout << "wrote " << set.size() << " samples (D=" << set.ambient_dim()
              << ", d=" << set.intrinsic_dim() << ") to " << out << "\n";
    return 0;
}

// Batch projection: one output row per query point with the query, the
// projected point, the support count, and the frame iterations.
int run_project(const std::string& cloud_path, const std::string& points_path, int degree,
                double weight_k, double h, const std::string& out, int threads) {
    const SampleSet cloud = read_cloud_csv(cloud_path);
    const SampleSet queries = read_cloud_csv(points_path);
    if (queries.ambient_dim() != cloud.ambient_dim())
        throw std::invalid_argument("project: query dimension does not match the cloud");

    WeightSpec spec;
    spec.k = weight_k;
    spec.h = h > 0 ? h : estimate_fill_distance(cloud).h_est;

    const Index n = queries.size();
    std::vector<Projection> results(static_cast<std::size_t>(n));
    std::vector<std::string> errors(static_cast<std::size_t>(n));

    const int workers = std::max(1, threads);
    std::vector<std::future<void>> futures;
    std::atomic<Index> next{0};
    for (int w = 0; w < workers; ++w) {
        futures.push_back(std::async(std::launch::async, [&]() {
            for (Index i = next++; i < n; i = next++) {
                try {
                    results[static_cast<std::size_t>(i)] =
                        mmls_project(cloud, queries.point(i), spec, degree);
                } catch (const MmlsError& err) {
                    errors[static_cast<std::size_t>(i)] = err.what();
                }
            }
        }));
    }
    for (auto& f : futures) f.get();

    std::ofstream os(out);
    if (!os) throw std::runtime_error("project: cannot open " + out);
    os << "# D=" << cloud.ambient_dim() << " columns=query,projected,support_count,iterations\n";
    char buf[64];
    Index failures = 0;
    for (Index i = 0; i < n; ++i) {
        if (!errors[static_cast<std::size_t>(i)].empty()) {
            os << "# query " << i << " failed: " << errors[static_cast<std::size_t>(i)] << "\n";
            ++failures;
            continue;
        }
        const auto& proj = results[static_cast<std::size_t>(i)];
        for (Index j = 0; j < cloud.ambient_dim(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", queries.points()(i, j));
            os << (j ? "," : "") << buf;
        }
        for (Index j = 0; j < cloud.ambient_dim(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", proj.point[j]);
            os << ',' << buf;
        }
        os << ',' << proj.support_count << ',' << proj.frame.iterations << "\n";
    }
    std::cout << "projected " << (n - failures) << "/" << n << " points (h=" << spec.h
              << ") to " << out << "\n";
    return failures == n && n > 0 ? 2 : 0;
}

int exit_code_for(StopReason reason) {
    return reason == StopReason::mmls_failure ? 2 : 0;
}

void print_report_line(const Report& report) {
    std::cout << report.config.problem << " [" << report.config.solver << ", "
              << (report.config.mode == CostMode::explicit_gradient ? "explicit" : "sampled")
              << "]: terminated=" << to_string(report.trace.reason)
              << " iterations=" << report.iterations;
    if (!report.trace.rows.empty()) {
        const auto& row = report.trace.final_row();
        std::cout << " cost=" << row.cost << " grad_norm=" << row.grad_norm;
    }
    std::cout << " " << report.metric << "=" << report.final_metric << "\n";
}

int run_optimize(ExperimentConfig config) {
    const Report report = run_experiment(config);
    print_report_line(report);
    return exit_code_for(report.trace.reason);
}

int run_bench(const std::string& suite, std::uint64_t seed, const std::string& out) {
    const auto configs = make_suite(suite, seed, out);
    const auto reports = run_suite(configs);
    int code = 0;
    for (const auto& report : reports) {
        print_report_line(report);
        code = std::max(code, exit_code_for(report.trace.reason));
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Riemannian optimization over sampled manifolds"};
    app.require_subcommand(1);
    // --h is a real option below; keep help on --help only
    app.set_help_flag("--help", "print help");

    // sample
    auto* sample = app.add_subcommand("sample", "Generate a benchmark point cloud");
    std::string sample_kind, sample_out;
    long long sample_n = 1000;
    std::uint64_t sample_seed = 0;
    double sample_noise = 0;
    std::vector<int> sample_params;
    sample->add_option("--kind", sample_kind, "prelim_surface|sphere|stiefel|fixed_rank")
        ->required();
    sample->add_option("--n", sample_n, "number of samples")->required();
    sample->add_option("--seed", sample_seed, "random seed")->required();
    sample->add_option("--noise", sample_noise, "Gaussian noise variance on coordinates");
    sample->add_option("--params", sample_params,
                       "shape (sphere: D; stiefel: rows cols; fixed_rank: rows cols rank)");
    sample->add_option("--out", sample_out, "output CSV path")->required();

    // project
    auto* project = app.add_subcommand("project", "Project a batch of points onto the cloud");
    project->set_help_flag("--help", "print help");
    std::string project_cloud, project_points, project_out;
    int project_degree = 3;
    double project_k = 1.5, project_h = 0;
    int project_threads = 4;
    project->add_option("--cloud", project_cloud, "cloud CSV")->required();
    project->add_option("--degree", project_degree, "polynomial degree")->required();
    project->add_option("--weight-k", project_k, "weight support multiplier");
    project->add_option("--h", project_h, "fill distance override");
    project->add_option("--points", project_points, "query points CSV")->required();
    project->add_option("--out", project_out, "output CSV path")->required();
    project->add_option("--threads", project_threads, "worker threads");

    // optimize
    auto* optimize = app.add_subcommand("optimize", "Run one optimization experiment");
    optimize->set_help_flag("--help", "print help");
    ExperimentConfig config;
    std::string opt_mode = "explicit", opt_beta = "prp", opt_out;
    long long opt_n = 0;
    optimize->add_option("--problem", config.problem, "registry problem name")->required();
    optimize->add_option("--solver", config.solver, "gd|cg")->check(CLI::IsMember({"gd", "cg"}));
    optimize->add_option("--mode", opt_mode, "explicit|sampled")
        ->check(CLI::IsMember({"explicit", "sampled"}));
    optimize->add_option("--n", opt_n, "sample count (0 = default)");
    optimize->add_option("--degree", config.degree, "polynomial degree (-1 = default)");
    optimize->add_option("--noise", config.noise_points,
                         "noise variance for points and values (-1 = default)");
    optimize->add_option("--seed", config.seed, "random seed");
    optimize->add_option("--grad-tol", config.options.grad_tol, "gradient-norm stop");
    optimize->add_option("--step-tol", config.options.step_tol, "step-size stop");
    optimize->add_option("--max-iters", config.options.max_iters, "iteration cap");
    optimize->add_option("--alpha-bar", config.options.alpha_bar, "initial step scale");
    optimize->add_option("--gamma", config.options.shrink_gamma, "backtracking shrink factor");
    optimize->add_option("--delta", config.options.armijo_delta, "sufficient-decrease constant");
    optimize->add_option("--beta", opt_beta, "fr|prp")->check(CLI::IsMember({"fr", "prp"}));
    optimize->add_option("--weight-k", config.weight_k, "weight support multiplier");
    optimize->add_option("--h", config.h_override, "fill distance override");
    optimize->add_option("--step-guard", config.step_guard,
                         "max tangent-step length (default k*h)");
    optimize->add_option("--out", opt_out, "output directory")->required();

    // bench
    auto* bench = app.add_subcommand("bench", "Run an experiment suite");
    std::string bench_suite = "smoke", bench_out;
    std::uint64_t bench_seed = 0;
    bench->add_option("--suite", bench_suite, "paper|smoke")
        ->check(CLI::IsMember({"paper", "smoke"}));
    bench->add_option("--seed", bench_seed, "random seed");
    bench->add_option("--out", bench_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*sample)
            return run_sample(sample_kind, sample_n, sample_seed, sample_noise, sample_params,
                              sample_out);
        if (*project)
            return run_project(project_cloud, project_points, project_degree, project_k,
                               project_h, project_out, project_threads);
        if (*optimize) {
            config.n = opt_n;
            config.noise_values = config.noise_points;
            config.mode =
                opt_mode == "sampled" ? CostMode::sampled : CostMode::explicit_gradient;
            config.options.beta_rule =
                opt_beta == "fr" ? BetaRule::fletcher_reeves : BetaRule::polak_ribiere_plus;
            config.out_dir = opt_out;
            return run_optimize(config);
        }
        if (*bench) return run_bench(bench_suite, bench_seed, bench_out);
    } catch (const std::invalid_argument& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    } catch (const MmlsError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 1;
}
