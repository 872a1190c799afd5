#pragma once

#include "mmlsro/types.hpp"

#include <vector>

namespace mmlsro {

struct Neighbor {
    Index index;
    Scalar distance;
};

/// Exact kd-tree over ambient coordinates. Splits on the widest dimension at
/// the median; no approximation anywhere, every query is exact. Queries are
/// const and safe to run concurrently.
class KdTree {
public:
    KdTree() = default;

    /// points: one sample per row (n x D). The tree keeps its own
    /// column-major copy for cache-friendly distance evaluation.
    explicit KdTree(const Matrix& points);

    Index size() const { return pts_.cols(); }

    /// All points with distance(point, x) < radius (strict), sorted by
    /// distance then index.
    std::vector<Neighbor> radius_search(const ConstVectorRef& x, Scalar radius) const;

    /// k nearest points (excluding skip, if >= 0), sorted by distance then
    /// index. Returns fewer when the cloud is smaller.
    std::vector<Neighbor> knn_search(const ConstVectorRef& x, Index k, Index skip = -1) const;

private:
    struct Node {
        int axis = -1;      // -1 marks a leaf
        Scalar split = 0;
        Index left = -1, right = -1;
        Index begin = 0, end = 0;  // leaf range into order_
    };

    Index build(Index begin, Index end);

    Matrix pts_;  // D x n, one point per column
    std::vector<Index> order_;
    std::vector<Node> nodes_;
    Index root_ = -1;
    static constexpr Index kLeafSize = 16;
};

}  // namespace mmlsro
