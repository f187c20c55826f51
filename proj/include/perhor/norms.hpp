#pragma once

#include <vector>

#include "perhor/signal.hpp"

namespace perhor {

/// Discounted L^alpha norm: composite trapezoid of e^{-rt} |s(t)|^alpha
/// over the stored horizon [0, K*T], plus the declared tail.
///   - ZeroExtend: the integrand is taken as 0 at the virtual endpoint
///     K*T and the tail contributes nothing.
///   - ExactPeriodic: the endpoint wraps to the first sample and the
///     tail sums the first-period integral geometrically,
///     tail = q^K/(1-q) * per-period integral.
double weighted_lp_norm(const Signal& s, NormOrder alpha, TailPolicy tail);

/// Same, with the signal's own declared tail policy.
double weighted_lp_norm(const Signal& s, NormOrder alpha);

/// Discounted L^alpha norm of one period [0, T): trapezoid with the T
/// endpoint wrapping to s_0 (samples live on the circle).
double weighted_lp_norm(const PeriodSignal& p, NormOrder alpha);

/// Plain Lebesgue L^alpha norm over [0, T] with the wrap convention.
double unweighted_lp_norm(const PeriodSignal& p, NormOrder alpha);

/// Discounted inner product <f, g> = integral of e^{-rt} f(t).g(t),
/// same trapezoid + tail treatment as weighted_lp_norm. Grids must match.
double weighted_inner_product(const Signal& a, const Signal& b, TailPolicy tail);

/// Discounted W^{1,alpha} norm, (||f||^alpha + ||f'||^alpha)^{1/alpha}
/// with f' the finite-difference derivative.
double weighted_sobolev_norm(const Signal& s, NormOrder alpha, TailPolicy tail);

/// Per-residue quadrature weights w_i for the period integral
/// integral_0^T e^{-rs} g(s) ds ~= sum_i w_i g(s_i), trapezoid on the
/// circle: the T endpoint carries weight (dt/2) e^{-rT} and wraps onto
/// s_0. Because the profile repeats per period (node i+k*m gets w_i q^k),
/// horizon sums built from it factor exactly through the geometric
/// moments; the decomposition module depends on that.
std::vector<double> period_profile_weights(const DiscountConfig& d, int m);

}  // namespace perhor
