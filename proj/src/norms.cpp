#include "perhor/norms.hpp"

#include <cmath>
#include <stdexcept>

#include "perhor/series.hpp"

namespace perhor {

namespace {

double vec_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// e^{-r s_i} |p_i|^alpha on one period, i = 0..m-1, plus the wrapped
// endpoint value e^{-rT} |p_0|^alpha.
double period_integral_pow(const PeriodSignal& p, double alpha) {
    const double dt = p.dt();
    const double r = p.discount.r;
    double acc = 0.0;
    double g_prev = std::pow(vec_norm(p.node(0)), alpha);  // weight e^0
    for (int i = 1; i < p.m; ++i) {
        const double g = std::exp(-r * p.time(i)) * std::pow(vec_norm(p.node(i)), alpha);
        acc += 0.5 * dt * (g_prev + g);
        g_prev = g;
    }
    const double g_wrap = p.discount.q() * std::pow(vec_norm(p.node(0)), alpha);
    acc += 0.5 * dt * (g_prev + g_wrap);
    return acc;
}

}  // namespace

double weighted_lp_norm(const Signal& s, NormOrder alpha, TailPolicy tail) {
    const Grid& g = s.grid;
    const double dt = g.dt();
    const double r = g.discount.r;
    const int N = g.num_nodes();

    double acc = 0.0;
    double prev = std::pow(vec_norm(s.node(0)), alpha.alpha);
    for (int j = 1; j < N; ++j) {
        const double cur =
            std::exp(-r * g.time(j)) * std::pow(vec_norm(s.node(j)), alpha.alpha);
        acc += 0.5 * dt * (prev + cur);
        prev = cur;
    }

    double endpoint = 0.0;
    if (tail == TailPolicy::ExactPeriodic)
        endpoint = std::pow(g.discount.q(), g.K) * std::pow(vec_norm(s.node(0)), alpha.alpha);
    acc += 0.5 * dt * (prev + endpoint);

    if (tail == TailPolicy::ExactPeriodic) {
        const double q = g.discount.q();
        acc += std::pow(q, g.K) / (1.0 - q) * period_integral_pow(restrict_to_period(s), alpha.alpha);
    }
    return std::pow(acc, 1.0 / alpha.alpha);
}

double weighted_lp_norm(const Signal& s, NormOrder alpha) {
    return weighted_lp_norm(s, alpha, s.tail);
}

double weighted_lp_norm(const PeriodSignal& p, NormOrder alpha) {
    return std::pow(period_integral_pow(p, alpha.alpha), 1.0 / alpha.alpha);
}

double unweighted_lp_norm(const PeriodSignal& p, NormOrder alpha) {
    // Trapezoid on the circle collapses to dt * sum.
    double acc = 0.0;
    for (int i = 0; i < p.m; ++i) acc += std::pow(vec_norm(p.node(i)), alpha.alpha);
    return std::pow(p.dt() * acc, 1.0 / alpha.alpha);
}

double weighted_inner_product(const Signal& a, const Signal& b, TailPolicy tail) {
    if (!a.grid.same_as(b.grid) || a.dim != b.dim)
        throw std::invalid_argument("weighted_inner_product: signals must share grid and dim");
    const Grid& g = a.grid;
    const double dt = g.dt();
    const double r = g.discount.r;
    const int N = g.num_nodes();

    auto dot = [&](int j) {
        double s = 0.0;
        for (int c = 0; c < a.dim; ++c) s += a.at(j, c) * b.at(j, c);
        return s;
    };

    double acc = 0.0;
    double prev = dot(0);
    for (int j = 1; j < N; ++j) {
        const double cur = std::exp(-r * g.time(j)) * dot(j);
        acc += 0.5 * dt * (prev + cur);
        prev = cur;
    }
    double endpoint = 0.0;
    if (tail == TailPolicy::ExactPeriodic)
        endpoint = std::pow(g.discount.q(), g.K) * dot(0);
    acc += 0.5 * dt * (prev + endpoint);

    if (tail == TailPolicy::ExactPeriodic) {
        // Geometric tail of the first-period inner product.
        const double q = g.discount.q();
        double per = 0.0;
        double p_prev = dot(0);
        for (int i = 1; i < g.m; ++i) {
            const double cur = std::exp(-r * g.time(i)) * dot(i);
            per += 0.5 * dt * (p_prev + cur);
            p_prev = cur;
        }
        per += 0.5 * dt * (p_prev + q * dot(0));
        acc += std::pow(q, g.K) / (1.0 - q) * per;
    }
    return acc;
}

double weighted_sobolev_norm(const Signal& s, NormOrder alpha, TailPolicy tail) {
    const double a = alpha.alpha;
    const double f = weighted_lp_norm(s, alpha, tail);
    const double fp = weighted_lp_norm(finite_diff_derivative(s), alpha, tail);
    return std::pow(std::pow(f, a) + std::pow(fp, a), 1.0 / a);
}

std::vector<double> period_profile_weights(const DiscountConfig& d, int m) {
    const double dt = d.T / m;
    std::vector<double> w(m);
    w[0] = 0.5 * dt * (1.0 + d.q());
    for (int i = 1; i < m; ++i) w[i] = dt * std::exp(-d.r * (i * dt));
    return w;
}

}  // namespace perhor
