#include "mmlsro/point_cloud.hpp"

#include "mmlsro/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mmlsro {

std::string to_string(ManifoldKind kind) {
    switch (kind) {
        case ManifoldKind::generic: return "generic";
        case ManifoldKind::prelim_surface: return "prelim_surface";
        case ManifoldKind::sphere: return "sphere";
        case ManifoldKind::stiefel: return "stiefel";
        case ManifoldKind::fixed_rank: return "fixed_rank";
    }
    return "generic";
}

SampleSet::SampleSet(Matrix points, std::optional<Vector> values, int intrinsic_dim,
                     ManifoldKind kind)
    : points_(std::move(points)), values_(std::move(values)), d_(intrinsic_dim), kind_(kind) {
    if (points_.rows() == 0) throw std::invalid_argument("SampleSet: empty cloud");
    if (d_ < 1 || d_ >= points_.cols())
        throw std::invalid_argument("SampleSet: need 1 <= d < D");
    if (values_ && values_->size() != points_.rows())
        throw std::invalid_argument("SampleSet: values length mismatch");
    if (!points_.allFinite()) throw std::invalid_argument("SampleSet: non-finite coordinates");
    index_ = KdTree(points_);
}

const Vector& SampleSet::values() const {
    if (!values_) throw MissingValues("SampleSet: no cost samples present");
    return *values_;
}

SampleSet build_cloud(const std::vector<Vector>& points, std::optional<Vector> values, int d) {
    if (points.empty()) throw std::invalid_argument("build_cloud: empty input");
    const Index dim = points.front().size();
    Matrix mat(static_cast<Index>(points.size()), dim);
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != dim) throw std::invalid_argument("build_cloud: ragged input");
        mat.row(static_cast<Index>(i)) = points[i].transpose();
    }
    return SampleSet(std::move(mat), std::move(values), d);
}

std::vector<Neighbor> neighbors_within(const SampleSet& set, const ConstVectorRef& x,
                                       Scalar radius) {
    if (radius <= 0) throw std::invalid_argument("neighbors_within: radius must be positive");
    if (x.size() != set.ambient_dim())
        throw std::invalid_argument("neighbors_within: query dimension mismatch");
    return set.index().radius_search(x, radius);
}

namespace {

// Distance to the k-th distinct neighbor shell of point i. Neighbors at the
// same distance (up to roundoff) share a rank, so on a grid the left and
// right neighbors count once; on generic clouds shells and neighbors
// coincide.
Scalar kth_distinct_neighbor_distance(const SampleSet& set, Index i, int k) {
    Index request = k;
    while (true) {
        request = std::min<Index>(request * 2, set.size() - 1);
        const auto nbrs = set.index().knn_search(set.points().row(i).transpose(), request, i);
        int rank = 0;
        Scalar shell = -1;
        for (const auto& nb : nbrs) {
            if (nb.distance > shell * (1.0 + 1e-9)) {
                ++rank;
                shell = nb.distance;
            }
            if (rank == k) return nb.distance;
        }
        if (request >= set.size() - 1) return nbrs.empty() ? 0 : nbrs.back().distance;
    }
}

}  // namespace

DensityEstimate estimate_fill_distance(const SampleSet& set) {
    const Index n = set.size();
    if (n < 2) throw std::invalid_argument("estimate_fill_distance: need at least 2 points");

    const int k = static_cast<int>(std::ceil(2.0 * set.intrinsic_dim()));
    std::vector<Scalar> kth(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i)
        kth[static_cast<std::size_t>(i)] = kth_distinct_neighbor_distance(set, i, k);
    const auto mid = kth.begin() + n / 2;
    std::nth_element(kth.begin(), mid, kth.end());
    const Scalar h_est = 2.0 * *mid;

    Scalar min_pair = std::numeric_limits<Scalar>::infinity();
    constexpr Index kExactLimit = 5000;
    if (n <= kExactLimit) {
        for (Index i = 0; i < n; ++i)
            for (Index j = i + 1; j < n; ++j)
                min_pair = std::min(min_pair, (set.points().row(i) - set.points().row(j)).norm());
    } else {
        // nearest-neighbor distance per point over a seeded random subsample
        // (partial Fisher-Yates, without replacement)
        Rng rng(0x5eedu);
        std::vector<Index> pool(static_cast<std::size_t>(n));
        std::iota(pool.begin(), pool.end(), Index{0});
        for (Index s = 0; s < kExactLimit; ++s) {
            const auto pick = s + static_cast<Index>(rng.index(static_cast<std::uint64_t>(n - s)));
            std::swap(pool[static_cast<std::size_t>(s)], pool[static_cast<std::size_t>(pick)]);
            const Index i = pool[static_cast<std::size_t>(s)];
            const auto nn = set.index().knn_search(set.points().row(i).transpose(), 1, i);
            if (!nn.empty()) min_pair = std::min(min_pair, nn.front().distance);
        }
    }
    return DensityEstimate{h_est, 0.5 * min_pair};
}

namespace {

// Orthonormal columns via Householder QR with the R diagonal sign-corrected,
// so the distribution does not depend on the QR implementation's sign choices.
Matrix gaussian_orthonormal(Index rows, Index cols, Rng& rng) {
    const Matrix gauss = rng.normal_matrix(rows, cols);
    Eigen::HouseholderQR<Matrix> qr(gauss);
    Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
    const Matrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
    for (Index c = 0; c < cols; ++c)
        if (r(c, c) < 0) q.col(c) = -q.col(c);
    return q;
}

Vector column_stack(const Matrix& m) {
    return Eigen::Map<const Vector>(m.data(), m.size());
}

}  // namespace

SampleSet sample_manifold(ManifoldKind kind, const std::vector<int>& params, Index n,
                          std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_manifold: need n >= 1");
    Rng rng(seed);

    switch (kind) {
        case ManifoldKind::prelim_surface: {
            const int D = 100;
            Matrix pts = Matrix::Ones(n, D);
            for (Index i = 0; i < n; ++i) {
                const Scalar x1 = rng.uniform(-1.0, 1.0);
                const Scalar x2 = rng.uniform(-1.0, 1.0);
                pts(i, 0) = x1;
                pts(i, 1) = x2;
                pts(i, 2) = std::sin(2.0 * M_PI * (x1 * x1 + x2 * x2));
            }
            return SampleSet(std::move(pts), std::nullopt, 2, kind);
        }
        case ManifoldKind::sphere: {
            if (params.size() != 1 || params[0] < 2)
                throw std::invalid_argument("sample_manifold: sphere expects params {D >= 2}");
            const int D = params[0];
            Matrix pts(n, D);
            for (Index i = 0; i < n; ++i) {
                Vector v = rng.normal_vector(D);
                while (v.norm() < 1e-12) v = rng.normal_vector(D);
                pts.row(i) = (v / v.norm()).transpose();
            }
            return SampleSet(std::move(pts), std::nullopt, D - 1, kind);
        }
        case ManifoldKind::stiefel: {
            if (params.size() != 2 || params[0] < params[1] || params[1] < 1)
                throw std::invalid_argument(
                    "sample_manifold: stiefel expects params {rows >= cols >= 1}");
            const Index rows = params[0], cols = params[1];
            const int d = static_cast<int>(rows * cols - cols * (cols + 1) / 2);
            Matrix pts(n, rows * cols);
            for (Index i = 0; i < n; ++i)
                pts.row(i) = column_stack(gaussian_orthonormal(rows, cols, rng)).transpose();
            return SampleSet(std::move(pts), std::nullopt, d, kind);
        }
        case ManifoldKind::fixed_rank: {
            if (params.size() != 3 || params[2] < 1 || params[2] > std::min(params[0], params[1]))
                throw std::invalid_argument(
                    "sample_manifold: fixed_rank expects params {rows, cols, 1 <= rank <= min}");
            const Index rows = params[0], cols = params[1], rank = params[2];
            const int d = static_cast<int>((rows + cols - rank) * rank);
            Matrix pts(n, rows * cols);
            for (Index i = 0; i < n; ++i) {
                const Matrix u = gaussian_orthonormal(rows, rank, rng);
                const Matrix v = gaussian_orthonormal(cols, rank, rng);
                Vector sigma(rank);
                for (Index s = 0; s < rank; ++s) sigma[s] = std::abs(rng.normal());
                const Matrix x = u * sigma.asDiagonal() * v.transpose();
                pts.row(i) = column_stack(x).transpose();
            }
            return SampleSet(std::move(pts), std::nullopt, d, kind);
        }
        case ManifoldKind::generic:
            break;
    }
    throw std::invalid_argument("sample_manifold: unknown kind");
}

SampleSet add_noise(const SampleSet& set, Scalar variance, std::uint64_t seed,
                    NoiseTarget target) {
    if (variance < 0) throw std::invalid_argument("add_noise: negative variance");
    const bool noisy_points = target != NoiseTarget::values;
    const bool noisy_values = target != NoiseTarget::points;
    if (noisy_values && !set.has_values())
        throw MissingValues("add_noise: target includes values but none are present");

    Matrix pts = set.points();
    Vector vals = set.has_values() ? set.values() : Vector();
    if (variance > 0) {
        Rng rng(seed);
        const Scalar sigma = std::sqrt(variance);
        if (noisy_points) {
            const Index noisy_cols =
                set.kind() == ManifoldKind::prelim_surface ? 3 : pts.cols();
            for (Index i = 0; i < pts.rows(); ++i)
                for (Index j = 0; j < noisy_cols; ++j) pts(i, j) += sigma * rng.normal();
        }
        if (noisy_values)
            for (Index i = 0; i < vals.size(); ++i) vals[i] += sigma * rng.normal();
    }
    std::optional<Vector> values_out;
    if (set.has_values()) values_out = std::move(vals);
    return SampleSet(std::move(pts), std::move(values_out), set.intrinsic_dim(), set.kind());
}

void write_cloud_csv(const SampleSet& set, std::ostream& out) {
    out << "# D=" << set.ambient_dim() << " d=" << set.intrinsic_dim()
        << " values=" << (set.has_values() ? 1 : 0) << "\n";
    char buf[64];
    for (Index i = 0; i < set.size(); ++i) {
        for (Index j = 0; j < set.ambient_dim(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", set.points()(i, j));
            out << (j ? "," : "") << buf;
        }
        if (set.has_values()) {
            std::snprintf(buf, sizeof(buf), "%.17g", set.values()[i]);
            out << ',' << buf;
        }
        out << '\n';
    }
}

void write_cloud_csv(const SampleSet& set, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_cloud_csv: cannot open " + path);
    write_cloud_csv(set, out);
}

SampleSet read_cloud_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_cloud_csv: empty stream");
    int D = 0, d = 0, has_values = 0;
    if (std::sscanf(line.c_str(), "# D=%d d=%d values=%d", &D, &d, &has_values) != 3)
        throw std::runtime_error("read_cloud_csv: bad header: " + line);

    std::vector<Vector> rows;
    std::vector<Scalar> vals;
    const int fields = D + (has_values ? 1 : 0);
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        Vector row(D);
        std::stringstream ss(line);
        std::string cell;
        int j = 0;
        for (; std::getline(ss, cell, ',') && j < fields; ++j) {
            const Scalar v = std::stod(cell);
            if (j < D)
                row[j] = v;
            else
                vals.push_back(v);
        }
        if (j != fields) throw std::runtime_error("read_cloud_csv: short row: " + line);
        rows.push_back(std::move(row));
    }
    std::optional<Vector> values;
    if (has_values) values = Eigen::Map<Vector>(vals.data(), static_cast<Index>(vals.size()));
    return build_cloud(rows, std::move(values), d);
}

SampleSet read_cloud_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_cloud_csv: cannot open " + path);
    return read_cloud_csv(in);
}

}  // namespace mmlsro
