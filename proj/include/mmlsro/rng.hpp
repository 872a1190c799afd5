#pragma once

#include "mmlsro/types.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace mmlsro {

/// Deterministic random stream. Wraps mt19937_64 but derives doubles itself
/// (53-bit uniforms, Box-Muller normals) so that a given seed produces the
/// same bytes on every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform on [0, 1).
    Scalar uniform01() {
        return static_cast<Scalar>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [lo, hi).
    Scalar uniform(Scalar lo, Scalar hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller; the paired deviate is cached.
    Scalar normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        Scalar u1 = uniform01();
        Scalar u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const Scalar radius = std::sqrt(-2.0 * std::log(u1));
        const Scalar angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Uniform integer in [0, n) by rejection, bias-free.
    std::uint64_t index(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t draw = gen_();
        while (draw >= limit) draw = gen_();
        return draw % n;
    }

    /// Vector of independent standard normals.
    Vector normal_vector(Index size) {
        Vector out(size);
        for (Index i = 0; i < size; ++i) out[i] = normal();
        return out;
    }

    /// Matrix of independent standard normals, column-major fill order.
    Matrix normal_matrix(Index rows, Index cols) {
        Matrix out(rows, cols);
        for (Index c = 0; c < cols; ++c)
            for (Index r = 0; r < rows; ++r) out(r, c) = normal();
        return out;
    }

private:
    std::mt19937_64 gen_;
    Scalar spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace mmlsro
