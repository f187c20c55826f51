#pragma once

#include <cmath>

namespace perhor {

/// Moments of the geometric weights: s0 = sum q^k, s1 = sum k q^k,
/// s2 = sum k^2 q^k over a k-range. These are the series every closed
/// form in the toolkit reduces to, so they live in one place and are
/// cross-checked against brute-force summation in the tests.
struct GeometricMoments {
    double s0 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
};

/// k = 0 .. infinity.
inline GeometricMoments full_moments(double q) {
    const double u = 1.0 - q;
    return {1.0 / u, q / (u * u), q * (1.0 + q) / (u * u * u)};
}

/// k = K .. infinity. Shift k = K + j and expand (K+j)^p.
inline GeometricMoments tail_moments(double q, int K) {
    const GeometricMoments f = full_moments(q);
    const double qK = std::pow(q, K);
    GeometricMoments t;
    t.s0 = qK * f.s0;
    t.s1 = qK * (K * f.s0 + f.s1);
    t.s2 = qK * (K * K * f.s0 + 2.0 * K * f.s1 + f.s2);
    return t;
}

/// k = 0 .. K-1.
inline GeometricMoments partial_moments(double q, int K) {
    const GeometricMoments f = full_moments(q);
    const GeometricMoments t = tail_moments(q, K);
    return {f.s0 - t.s0, f.s1 - t.s1, f.s2 - t.s2};
}

}  // namespace perhor
