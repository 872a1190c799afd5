#pragma once

#include "mmlsro/types.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mmlsro {

/// Compactly supported smooth weight family shared by every weighted
/// least-squares stage. Support radius is k*h.
struct WeightSpec {
    Scalar k = 1.5;  ///< support multiplier
    Scalar h = 1.0;  ///< fill distance, ambient length units

    Scalar support_radius() const { return k * h; }

    WeightSpec with_h(Scalar new_h) const { return WeightSpec{k, new_h}; }
};

/// theta(k; t) = exp(-t^2 / (t - k h)^2) on [0, k h), and 0 from k h on.
/// C-infinity on [0, inf); underflows smoothly to zero near the support edge.
template <class T>
inline T theta(T k, T h, T t) {
    if (t < T(0)) throw std::invalid_argument("theta: negative distance");
    const T edge = k * h;
    if (t >= edge) return T(0);
    const T gap = t - edge;
    // 0/0 guard at the support edge.
    if (gap * gap < std::numeric_limits<T>::epsilon() * t * t) return T(0);
    return std::exp(-(t * t) / (gap * gap));
}

inline Scalar theta(const WeightSpec& spec, Scalar t) {
    return theta(spec.k, spec.h, t);
}

}  // namespace mmlsro
