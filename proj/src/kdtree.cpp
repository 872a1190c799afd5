#include "mmlsro/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace mmlsro {

namespace {

// Sequential sum of squares: one canonical result regardless of Eigen's
// vectorization and alignment choices, so brute-force scans agree exactly.
Scalar squared_distance(const Scalar* a, const Scalar* b, Index n) {
    Scalar sum = 0;
    for (Index i = 0; i < n; ++i) {
        const Scalar diff = a[i] - b[i];
        sum += diff * diff;
    }
    return sum;
}

}  // namespace

KdTree::KdTree(const Matrix& points) {
    pts_ = points.transpose();
    order_.resize(static_cast<std::size_t>(pts_.cols()));
    std::iota(order_.begin(), order_.end(), Index{0});
    nodes_.reserve(static_cast<std::size_t>(2 * pts_.cols() / kLeafSize + 2));
    if (pts_.cols() > 0) root_ = build(0, pts_.cols());
}

Index KdTree::build(Index begin, Index end) {
    const Index node_id = static_cast<Index>(nodes_.size());
    nodes_.emplace_back();
    if (end - begin <= kLeafSize) {
        nodes_[static_cast<std::size_t>(node_id)].begin = begin;
        nodes_[static_cast<std::size_t>(node_id)].end = end;
        return node_id;
    }

    // split on the widest dimension of this subset
    const int dim = static_cast<int>(pts_.rows());
    int axis = 0;
    Scalar widest = -1;
    for (int a = 0; a < dim; ++a) {
        Scalar lo = pts_(a, order_[static_cast<std::size_t>(begin)]);
        Scalar hi = lo;
        for (Index i = begin + 1; i < end; ++i) {
            const Scalar v = pts_(a, order_[static_cast<std::size_t>(i)]);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > widest) {
            widest = hi - lo;
            axis = a;
        }
    }
    if (widest <= 0) {  // all points identical: keep as one leaf
        nodes_[static_cast<std::size_t>(node_id)].begin = begin;
        nodes_[static_cast<std::size_t>(node_id)].end = end;
        return node_id;
    }

    const Index mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](Index a, Index b) { return pts_(axis, a) < pts_(axis, b); });
    const Scalar split = pts_(axis, order_[static_cast<std::size_t>(mid)]);

    const Index left = build(begin, mid);
    const Index right = build(mid, end);
    Node& node = nodes_[static_cast<std::size_t>(node_id)];
    node.axis = axis;
    node.split = split;
    node.left = left;
    node.right = right;
    return node_id;
}

std::vector<Neighbor> KdTree::radius_search(const ConstVectorRef& x, Scalar radius) const {
    std::vector<Neighbor> hits;
    if (root_ < 0 || radius <= 0) return hits;
    if (!x.allFinite()) throw std::invalid_argument("radius_search: non-finite query");

    // Prune on a slightly inflated squared radius; accept by the exact
    // distance test so results match a brute-force scan bit for bit.
    const Scalar bound2 = radius * radius * (1.0 + 1e-12);

    std::vector<Index> stack{root_};
    while (!stack.empty()) {
        const Node& node = nodes_[static_cast<std::size_t>(stack.back())];
        stack.pop_back();
        if (node.axis < 0) {
            for (Index i = node.begin; i < node.end; ++i) {
                const Index idx = order_[static_cast<std::size_t>(i)];
                const Scalar dist =
                    std::sqrt(squared_distance(pts_.col(idx).data(), x.data(), pts_.rows()));
                if (dist < radius) hits.push_back({idx, dist});
            }
            continue;
        }
        const Scalar gap = x[node.axis] - node.split;
        if (gap < 0) {
            stack.push_back(node.left);
            if (gap * gap <= bound2) stack.push_back(node.right);
        } else {
            stack.push_back(node.right);
            if (gap * gap <= bound2) stack.push_back(node.left);
        }
    }
    std::sort(hits.begin(), hits.end(), [](const Neighbor& a, const Neighbor& b) {
        return a.distance != b.distance ? a.distance < b.distance : a.index < b.index;
    });
    return hits;
}

std::vector<Neighbor> KdTree::knn_search(const ConstVectorRef& x, Index k, Index skip) const {
    std::vector<Neighbor> out;
    if (root_ < 0 || k <= 0) return out;
    if (!x.allFinite()) throw std::invalid_argument("knn_search: non-finite query");

    struct Candidate {
        Scalar dist2;
        Index index;
        bool operator<(const Candidate& other) const {  // max-heap by (dist2, index)
            return dist2 != other.dist2 ? dist2 < other.dist2 : index < other.index;
        }
    };
    std::priority_queue<Candidate> heap;

    auto worst2 = [&]() {
        return heap.size() < static_cast<std::size_t>(k)
                   ? std::numeric_limits<Scalar>::infinity()
                   : heap.top().dist2;
    };

    // recursive descent, near side first
    auto visit = [&](auto&& self, Index node_id) -> void {
        const Node& node = nodes_[static_cast<std::size_t>(node_id)];
        if (node.axis < 0) {
            for (Index i = node.begin; i < node.end; ++i) {
                const Index idx = order_[static_cast<std::size_t>(i)];
                if (idx == skip) continue;
                const Scalar d2 = squared_distance(pts_.col(idx).data(), x.data(), pts_.rows());
                const Candidate cand{d2, idx};
                if (heap.size() < static_cast<std::size_t>(k)) {
                    heap.push(cand);
                } else if (cand < heap.top()) {
                    heap.pop();
                    heap.push(cand);
                }
            }
            return;
        }
        const Scalar gap = x[node.axis] - node.split;
        const Index near = gap < 0 ? node.left : node.right;
        const Index far = gap < 0 ? node.right : node.left;
        self(self, near);
        if (gap * gap <= worst2()) self(self, far);
    };
    visit(visit, root_);

    out.reserve(heap.size());
    while (!heap.empty()) {
        out.push_back({heap.top().index, std::sqrt(heap.top().dist2)});
        heap.pop();
    }
    std::sort(out.begin(), out.end(), [](const Neighbor& a, const Neighbor& b) {
        return a.distance != b.distance ? a.distance < b.distance : a.index < b.index;
    });
    return out;
}

}  // namespace mmlsro
