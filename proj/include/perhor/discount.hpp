#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace perhor {

/// How sampled data is continued beyond the stored horizon [0, K*T).
enum class TailPolicy {
    ZeroExtend,     ///< data is zero beyond the horizon
    ExactPeriodic,  ///< data tiles its first period beyond the horizon
};

inline const char* to_string(TailPolicy t) {
    return t == TailPolicy::ZeroExtend ? "zero" : "periodic";
}

/// Discount rate r (1/time) and period T (time). The per-period decay
/// factor q = e^{-rT} must stay strictly inside (0, 1); configurations
/// with q > 1 - 1e-8 are rejected as numerically degenerate, since every
/// downstream formula carries 1/(1-q).
struct DiscountConfig {
    double r;
    double T;

    DiscountConfig(double rate, double period) : r(rate), T(period) {
        if (!(std::isfinite(r) && r > 0.0))
            throw std::invalid_argument("DiscountConfig: r must be finite and > 0");
        if (!(std::isfinite(T) && T > 0.0))
            throw std::invalid_argument("DiscountConfig: T must be finite and > 0");
        if (q() > 1.0 - 1e-8)
            throw std::invalid_argument(
                "DiscountConfig: e^{-rT} too close to 1 (r*T = " + std::to_string(r * T) + ")");
    }

    /// Per-period decay factor q = e^{-rT}, in (0, 1).
    double q() const { return std::exp(-r * T); }

    bool same_as(const DiscountConfig& other) const {
        return r == other.r && T == other.T;
    }
};

/// Lebesgue exponent alpha >= 1.
struct NormOrder {
    double alpha;
    explicit NormOrder(double a) : alpha(a) {
        if (!(std::isfinite(alpha) && alpha >= 1.0))
            throw std::invalid_argument("NormOrder: alpha must be finite and >= 1");
    }
};

}  // namespace perhor
