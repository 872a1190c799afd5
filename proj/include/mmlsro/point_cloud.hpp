#pragma once

#include "mmlsro/kdtree.hpp"
#include "mmlsro/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mmlsro {

/// Provenance of a generated cloud; drives noise masking for the
/// graph-surface benchmark (only its first three coordinates vary).
enum class ManifoldKind { generic, prelim_surface, sphere, stiefel, fixed_rank };

std::string to_string(ManifoldKind kind);

/// Immutable cloud of manifold samples with optional scalar cost samples and
/// an exact spatial index. Concurrent reads are safe.
class SampleSet {
public:
    /// points: n x D, one sample per row. d is the user-declared intrinsic
    /// dimension, 1 <= d < D. values, when present, has one entry per row.
    SampleSet(Matrix points, std::optional<Vector> values, int intrinsic_dim,
              ManifoldKind kind = ManifoldKind::generic);

    Index size() const { return points_.rows(); }
    int ambient_dim() const { return static_cast<int>(points_.cols()); }
    int intrinsic_dim() const { return d_; }
    ManifoldKind kind() const { return kind_; }

    const Matrix& points() const { return points_; }
    Vector point(Index i) const { return points_.row(i).transpose(); }
    bool has_values() const { return values_.has_value(); }
    const Vector& values() const;
    const KdTree& index() const { return index_; }

private:
    Matrix points_;
    std::optional<Vector> values_;
    int d_;
    ManifoldKind kind_;
    KdTree index_;
};

/// Sampling-density summary of a cloud.
struct DensityEstimate {
    Scalar h_est = 0;      ///< estimated fill distance
    Scalar delta_est = 0;  ///< estimated separation radius
};

/// Build a cloud from raw rows. Throws std::invalid_argument on ragged rows,
/// d >= D, or a values-length mismatch.
SampleSet build_cloud(const std::vector<Vector>& points, std::optional<Vector> values, int d);

/// Exact radius query against the cloud's index: every index i with
/// ||r_i - x|| < radius, sorted by distance then index.
std::vector<Neighbor> neighbors_within(const SampleSet& set, const ConstVectorRef& x,
                                       Scalar radius);

/// Estimate fill distance and separation radius.
/// h_est: twice the median over points of the distance to the ceil(2d)-th
/// nearest neighbor, where neighbors at exactly equal distances share a rank.
/// delta_est: half the minimum pairwise distance, exact for n <= 5000 and
/// otherwise via nearest-neighbor distances over a seeded 5000-point
/// subsample.
DensityEstimate estimate_fill_distance(const SampleSet& set);

/// Benchmark cloud generators. Deterministic under seed.
///   prelim_surface: params ignored, D = 100, d = 2; x1, x2 uniform on
///     [-1, 1]^2, x3 = sin(2*pi*(x1^2 + x2^2)), remaining coordinates 1.
///   sphere: params = {D}; uniform unit vectors, d = D - 1.
///   stiefel: params = {rows, cols}; orthonormal-column matrices, flattened
///     column-stacked, d = rows*cols - cols*(cols+1)/2.
///   fixed_rank: params = {rows, cols, rank}; rank-k matrices flattened
///     column-stacked, d = (rows + cols - rank)*rank.
SampleSet sample_manifold(ManifoldKind kind, const std::vector<int>& params, Index n,
                          std::uint64_t seed);

enum class NoiseTarget { points, values, both };

/// Add independent zero-mean Gaussian noise of the given variance to the
/// targeted coordinates/values; returns a new set, the input is untouched.
/// On prelim_surface clouds only the first three coordinates are perturbed.
SampleSet add_noise(const SampleSet& set, Scalar variance, std::uint64_t seed,
                    NoiseTarget target);

/// Cloud CSV: header "# D=<int> d=<int> values=<0|1>", then one row per
/// sample with D full-precision coordinates and an optional final value
/// column. Round-trips exactly.
void write_cloud_csv(const SampleSet& set, std::ostream& out);
void write_cloud_csv(const SampleSet& set, const std::string& path);
SampleSet read_cloud_csv(std::istream& in);
SampleSet read_cloud_csv(const std::string& path);

}  // namespace mmlsro
