#pragma once

#include "mmlsro/point_cloud.hpp"
#include "mmlsro/weights.hpp"

#include <vector>

namespace mmlsro::detail {

struct Support {
    Vector weights;           // positive entries, aligned with rows
    std::vector<Index> rows;  // sample indices with positive weight
    Scalar h_eff = 0;
};

// Samples with positive weight around q; grows the weight's h until at least
// `needed` of them carry positive weight or the expansion budget runs out.
inline Support collect_support(const SampleSet& set, const ConstVectorRef& q,
                               const WeightSpec& spec, Index needed, Scalar expand,
                               int max_expansions) {
    Support sup;
    Scalar h = spec.h;
    for (int attempt = 0; attempt <= max_expansions; ++attempt) {
        sup.rows.clear();
        std::vector<Scalar> w;
        for (const auto& nb : set.index().radius_search(q, spec.k * h)) {
            const Scalar wi = theta(spec.k, h, nb.distance);
            if (wi > 0) {
                sup.rows.push_back(nb.index);
                w.push_back(wi);
            }
        }
        sup.h_eff = h;
        if (static_cast<Index>(sup.rows.size()) >= needed) {
            sup.weights = Eigen::Map<Vector>(w.data(), static_cast<Index>(w.size()));
            return sup;
        }
        h *= expand;
    }
    sup.rows.clear();
    return sup;
}

}  // namespace mmlsro::detail
