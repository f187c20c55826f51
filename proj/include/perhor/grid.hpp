#pragma once

#include <stdexcept>

#include "perhor/discount.hpp"

namespace perhor {

/// Uniform sampling of [0, K*T) aligned to the period: m samples per
/// period, K periods retained, dt = T/m. Node j lives at t_j = s_i + k*T
/// with i = j mod m, k = j div m, so t_{j+m} = t_j + T holds exactly in
/// floating point.
struct Grid {
    DiscountConfig discount;
    int m;
    int K;

    double dt() const { return discount.T / m; }
    int num_nodes() const { return m * K; }

    double time(int j) const {
        const int k = j / m;
        const int i = j % m;
        return i * dt() + k * discount.T;
    }

    bool same_as(const Grid& other) const {
        return discount.same_as(other.discount) && m == other.m && K == other.K;
    }
};

inline Grid make_grid(const DiscountConfig& discount, int m, int K) {
    if (m < 2) throw std::invalid_argument("make_grid: need m >= 2 samples per period");
    if (K < 1) throw std::invalid_argument("make_grid: need K >= 1 periods");
    return Grid{discount, m, K};
}

}  // namespace perhor
