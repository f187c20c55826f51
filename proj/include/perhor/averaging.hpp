#pragma once

#include "perhor/norms.hpp"
#include "perhor/signal.hpp"

namespace perhor {

/// Parameters of the geometric averaging series: truncation tolerance
/// and term cap. The discount must match the data the operator is
/// applied to.
struct AveragingParams {
    DiscountConfig discount;
    double tol = 1e-10;
    long max_terms = 1000000;

    AveragingParams(DiscountConfig d, double tol_ = 1e-10, long max_terms_ = 1000000)
        : discount(d), tol(tol_), max_terms(max_terms_) {
        if (!(tol > 0.0)) throw std::invalid_argument("AveragingParams: tol must be > 0");
        if (max_terms < 1) throw std::invalid_argument("AveragingParams: max_terms must be >= 1");
    }
};

/// Averaging operator on sampled data: out_i = (1-q) sum_k q^k s[i + k*m].
/// ZeroExtend signals contribute exactly their K stored periods (the sum
/// never extrapolates); ExactPeriodic signals get the geometric tail of
/// their tiled first period, which makes the operator the identity on
/// tiled data bit-for-bit.
PeriodSignal average_signal(const Signal& s, const AveragingParams& params);

/// k-weighted variant: out_i = ((1-q)^2/q) sum_k k q^k s[i + k*m], same
/// tail handling. Normalized so that constants are fixed points.
PeriodSignal average_tilde_signal(const Signal& s, const AveragingParams& params);

/// One boundedness check of the averaging operator:
///   lhs = ||A s||_{L^alpha(0,T)}   (plain Lebesgue norm),
///   rhs = ((1-q)/q)^{1/alpha} * ||s||_{L^alpha(mu_r)}.
/// ok accepts lhs <= rhs within a quadrature slack of 10*dt.
struct OperatorNormReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool ok = false;
};

OperatorNormReport operator_norm_check(const Signal& s, NormOrder alpha);

}  // namespace perhor
