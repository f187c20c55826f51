#include "perhor/averaged_lagrangian.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "perhor/rng.hpp"

namespace perhor {

AveragedLagrangian::AveragedLagrangian(Lagrangian base, AveragingParams params)
    : base_(std::move(base)), params_(params) {
    if (!base_.value) throw std::invalid_argument("AveragedLagrangian: base value missing");
    if (base_.dim < 1) throw std::invalid_argument("AveragedLagrangian: dim must be >= 1");
}

namespace {

double sq_norm(StateSpan v) {
    double s = 0.0;
    for (double a : v) s += a * a;
    return s;
}

[[noreturn]] void throw_nonconvergent(double s, long terms) {
    throw std::runtime_error("averaged integrand series did not converge at s = " +
                             std::to_string(s) + " after " + std::to_string(terms) +
                             " terms (terms not decreasing)");
}

}  // namespace

double AveragedLagrangian::value(double s, StateSpan x, StateSpan y,
                                 SeriesStats& stats) const {
    if (base_.periodic_in_t) {
        stats = {1, 0.0, true};
        return base_.value(s, x, y);
    }

    const double q = params_.discount.q();
    const double T = params_.discount.T;

    // A-priori bound on |L| along the ray, when the metadata provides one.
    double apriori = std::numeric_limits<double>::infinity();
    if (base_.meta.c1 && base_.meta.alpha)
        apriori = *base_.meta.c1 *
                  (1.0 + std::pow(std::sqrt(sq_norm(y)), *base_.meta.alpha));

    double acc = 0.0;
    double w = 1.0 - q;   // (1-q) q^k
    double qk1 = q;       // q^{k+1}, bounds the unsummed weight mass
    double run_max = 0.0;
    double prev_wterm = std::numeric_limits<double>::infinity();
    double last_wterm = std::numeric_limits<double>::infinity();

    long k = 0;
    for (; k < params_.max_terms; ++k) {
        const double Lk = base_.value(s + k * T, x, y);
        if (!std::isfinite(Lk))
            throw std::runtime_error("averaged integrand: non-finite term at t = " +
                                     std::to_string(s + k * T));
        acc += w * Lk;
        run_max = std::max(run_max, std::abs(Lk));
        prev_wterm = last_wterm;
        last_wterm = w * std::abs(Lk);

        const double bound = std::min(run_max, apriori);
        if (qk1 * bound < params_.tol) {
            stats = {k + 1, qk1, true};
            return acc;
        }
        w *= q;
        qk1 *= q;
    }

    stats = {k, qk1 / q, false};
    if (last_wterm >= prev_wterm) throw_nonconvergent(s, k);
    return acc;
}

double AveragedLagrangian::value(double s, StateSpan x, StateSpan y) const {
    SeriesStats stats;
    return value(s, x, y, stats);
}

void AveragedLagrangian::grad(double s, StateSpan x, StateSpan y, double& d_s,
                              std::span<double> d_x, std::span<double> d_y,
                              SeriesStats& stats) const {
    if (!base_.has_grad())
        throw std::invalid_argument("AveragedLagrangian::grad: base gradient missing");
    const int n = base_.dim;
    if (base_.periodic_in_t) {
        stats = {1, 0.0, true};
        base_.grad(s, x, y, d_s, d_x, d_y);
        return;
    }

    const double q = params_.discount.q();
    const double T = params_.discount.T;

    d_s = 0.0;
    for (int c = 0; c < n; ++c) d_x[c] = 0.0;
    for (int c = 0; c < n; ++c) d_y[c] = 0.0;

    std::vector<double> gx(n), gy(n);
    double w = 1.0 - q;
    double qk1 = q;
    double run_max = 0.0;
    double prev_wterm = std::numeric_limits<double>::infinity();
    double last_wterm = std::numeric_limits<double>::infinity();

    long k = 0;
    for (; k < params_.max_terms; ++k) {
        double gt;
        base_.grad(s + k * T, x, y, gt, gx, gy);
        double mag = std::abs(gt);
        for (int c = 0; c < n; ++c) mag += std::abs(gx[c]) + std::abs(gy[c]);
        if (!std::isfinite(mag))
            throw std::runtime_error("averaged gradient: non-finite term at t = " +
                                     std::to_string(s + k * T));

        d_s += w * gt;
        for (int c = 0; c < n; ++c) d_x[c] += w * gx[c];
        for (int c = 0; c < n; ++c) d_y[c] += w * gy[c];

        run_max = std::max(run_max, mag);
        prev_wterm = last_wterm;
        last_wterm = w * mag;

        if (qk1 * run_max < params_.tol) {
            stats = {k + 1, qk1, true};
            return;
        }
        w *= q;
        qk1 *= q;
    }

    stats = {k, qk1 / q, false};
    if (last_wterm >= prev_wterm) throw_nonconvergent(s, k);
}

void AveragedLagrangian::grad(double s, StateSpan x, StateSpan y, double& d_s,
                              std::span<double> d_x, std::span<double> d_y) const {
    SeriesStats stats;
    grad(s, x, y, d_s, d_x, d_y, stats);
}

AveragedLagrangian averaged_lagrangian(Lagrangian L, const AveragingParams& params) {
    return AveragedLagrangian(std::move(L), params);
}

std::function<void(double, StateSpan, StateSpan, double&, std::span<double>, std::span<double>)>
averaged_lagrangian_grad(const AveragedLagrangian& AL) {
    if (!AL.has_grad())
        throw std::invalid_argument("averaged_lagrangian_grad: base gradient missing");
    return [AL](double s, StateSpan x, StateSpan y, double& d_s, std::span<double> d_x,
                std::span<double> d_y) { AL.grad(s, x, y, d_s, d_x, d_y); };
}

StructuralReport structural_checks(const AveragedLagrangian& AL, int samples,
                                   unsigned long long seed, double box) {
    Rng rng(seed);
    const int n = AL.dim();
    const double T = AL.params().discount.T;
    const auto& meta = AL.base().meta;

    StructuralReport rep;
    rep.samples = samples;
    std::vector<double> x(n), y1(n), y2(n), ymid(n);

    auto record = [&](const char* check, double s, const std::vector<double>& y,
                      const std::vector<double>& y_alt, double lhs, double rhs) {
        ++rep.failures;
        if (rep.witnesses.size() < 8)
            rep.witnesses.push_back({check, s, x, y, y_alt, lhs, rhs});
    };

    for (int i = 0; i < samples; ++i) {
        const double s = rng.uniform(0.0, T);
        for (int c = 0; c < n; ++c) x[c] = rng.uniform(-box, box);
        for (int c = 0; c < n; ++c) y1[c] = rng.uniform(-box, box);
        for (int c = 0; c < n; ++c) y2[c] = rng.uniform(-box, box);
        for (int c = 0; c < n; ++c) ymid[c] = 0.5 * (y1[c] + y2[c]);

        const double f1 = AL.value(s, x, y1);
        const double f2 = AL.value(s, x, y2);
        const double fm = AL.value(s, x, ymid);
        const double slack = 1e-9 * (1.0 + std::abs(f1) + std::abs(f2));
        if (fm > 0.5 * (f1 + f2) + slack)
            record("convexity-midpoint", s, y1, y2, fm, 0.5 * (f1 + f2));

        if (meta.rho) {
            const double bound = meta.rho(y1);
            if (f1 < bound - slack) record("coercivity-lower-bound", s, y1, {}, f1, bound);
        }
        if (meta.c0 && meta.alpha) {
            const double lo = *meta.c0 * std::pow(std::sqrt(sq_norm(y1)), *meta.alpha);
            if (f1 < lo - slack) record("sandwich-lower", s, y1, {}, f1, lo);
        }
        if (meta.c1 && meta.alpha) {
            const double hi = *meta.c1 * (1.0 + std::pow(std::sqrt(sq_norm(y1)), *meta.alpha));
            if (f1 > hi + slack) record("sandwich-upper", s, y1, {}, f1, hi);
        }
    }
    return rep;
}

}  // namespace perhor
