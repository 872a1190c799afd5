#pragma once

#include "mmlsro/types.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mmlsro {

/// Number of monomials of total degree <= m in d variables: C(d + m, m).
inline Index monomial_count(int d, int m) {
    if (d < 1 || m < 0) throw std::invalid_argument("monomial_count: need d >= 1, m >= 0");
    std::uint64_t count = 1;
    for (int i = 1; i <= m; ++i) count = count * (d + i) / i;
    return static_cast<Index>(count);
}

/// Exponent tuples of all monomials of total degree <= m in d variables,
/// graded-lexicographic: degree ascending, and within a degree the leading
/// variable carries the highest remaining exponent first. Constant term
/// first, then x1, ..., xd. This order is fixed; coefficient files depend
/// on it.
inline std::vector<std::vector<int>> monomial_exponents(int d, int m) {
    std::vector<std::vector<int>> out;
    out.reserve(static_cast<std::size_t>(monomial_count(d, m)));
    std::vector<int> expo(static_cast<std::size_t>(d), 0);
    for (int deg = 0; deg <= m; ++deg) {
        // enumerate compositions of deg into d parts, first part largest first
        auto recurse = [&](auto&& self, int pos, int remaining) -> void {
            if (pos == d - 1) {
                expo[static_cast<std::size_t>(pos)] = remaining;
                out.push_back(expo);
                return;
            }
            for (int e = remaining; e >= 0; --e) {
                expo[static_cast<std::size_t>(pos)] = e;
                self(self, pos + 1, remaining - e);
            }
        };
        recurse(recurse, 0, deg);
    }
    return out;
}

/// Evaluate every monomial of total degree <= m at x, graded-lex order.
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> monomial_basis(
    int m, const Eigen::MatrixBase<Derived>& x) {
    using T = typename Derived::Scalar;
    const int d = static_cast<int>(x.size());
    const auto exponents = monomial_exponents(d, m);
    // power table: powers(j, e) = x_j^e
    Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> powers(d, m + 1);
    for (int j = 0; j < d; ++j) {
        powers(j, 0) = T(1);
        for (int e = 1; e <= m; ++e) powers(j, e) = powers(j, e - 1) * x[j];
    }
    Eigen::Matrix<T, Eigen::Dynamic, 1> values(static_cast<Index>(exponents.size()));
    for (std::size_t i = 0; i < exponents.size(); ++i) {
        T v = T(1);
        for (int j = 0; j < d; ++j) v *= powers(j, exponents[i][static_cast<std::size_t>(j)]);
        values[static_cast<Index>(i)] = v;
    }
    return values;
}

/// Same evaluation against a precomputed exponent table (hot loops).
template <class Derived>
void monomial_basis_into(const std::vector<std::vector<int>>& exponents, int m,
                         const Eigen::MatrixBase<Derived>& x,
                         Eigen::Ref<Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>> out) {
    using T = typename Derived::Scalar;
    const int d = static_cast<int>(x.size());
    Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> powers(d, m + 1);
    for (int j = 0; j < d; ++j) {
        powers(j, 0) = T(1);
        for (int e = 1; e <= m; ++e) powers(j, e) = powers(j, e - 1) * x[j];
    }
    for (std::size_t i = 0; i < exponents.size(); ++i) {
        T v = T(1);
        for (int j = 0; j < d; ++j) v *= powers(j, exponents[i][static_cast<std::size_t>(j)]);
        out[static_cast<Index>(i)] = v;
    }
}

}  // namespace mmlsro
