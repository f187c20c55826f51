#pragma once

#include <functional>
#include <span>
#include <vector>

#include "perhor/grid.hpp"

namespace perhor {

/// R^n-valued samples on a Grid, node-major layout (values[j*dim + c]).
/// Carries the tail policy that declares how the data continues beyond
/// the stored horizon; operations that need the infinite-horizon picture
/// honor it.
struct Signal {
    Grid grid;
    int dim = 1;
    TailPolicy tail = TailPolicy::ZeroExtend;
    std::vector<double> values;

    Signal(Grid g, int n, std::vector<double> vals,
           TailPolicy tp = TailPolicy::ZeroExtend);

    double at(int node, int c = 0) const { return values[static_cast<size_t>(node) * dim + c]; }
    double& at(int node, int c = 0) { return values[static_cast<size_t>(node) * dim + c]; }
    std::span<const double> node(int j) const {
        return {values.data() + static_cast<size_t>(j) * dim, static_cast<size_t>(dim)};
    }

    /// Sample fn(t) -> R^n (written into the out span) on every grid node.
    static Signal from_function(
        Grid g, int n,
        const std::function<void(double t, std::span<double> out)>& fn,
        TailPolicy tp = TailPolicy::ZeroExtend);

    /// Scalar convenience.
    static Signal from_scalar_function(Grid g, const std::function<double(double)>& fn,
                                       TailPolicy tp = TailPolicy::ZeroExtend);
};

/// R^n-valued samples on one period [0, T): m nodes at s_i = i*T/m.
/// The point T itself is not stored; period-level quadrature treats the
/// samples as living on the circle (the T endpoint wraps to s_0).
struct PeriodSignal {
    DiscountConfig discount;
    int m = 2;
    int dim = 1;
    std::vector<double> values;

    PeriodSignal(DiscountConfig d, int m_, int n, std::vector<double> vals);

    double dt() const { return discount.T / m; }
    double time(int i) const { return i * dt(); }
    double at(int i, int c = 0) const { return values[static_cast<size_t>(i) * dim + c]; }
    double& at(int i, int c = 0) { return values[static_cast<size_t>(i) * dim + c]; }
    std::span<const double> node(int i) const {
        return {values.data() + static_cast<size_t>(i) * dim, static_cast<size_t>(dim)};
    }

    static PeriodSignal from_function(
        DiscountConfig d, int m, int n,
        const std::function<void(double t, std::span<double> out)>& fn);
    static PeriodSignal from_scalar_function(DiscountConfig d, int m,
                                             const std::function<double(double)>& fn);
    static PeriodSignal zeros(DiscountConfig d, int m, int n);
};

/// Tile one period over K periods. The result is declared ExactPeriodic.
Signal periodic_extend(const PeriodSignal& p, int K);

/// First stored period of s.
PeriodSignal restrict_to_period(const Signal& s);

/// Finite-difference derivative: 2nd-order central at interior nodes,
/// 2nd-order one-sided at the two boundary nodes. Needs >= 3 samples.
Signal finite_diff_derivative(const Signal& s);
PeriodSignal finite_diff_derivative(const PeriodSignal& p);

}  // namespace perhor
