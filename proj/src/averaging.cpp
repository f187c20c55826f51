#include "perhor/averaging.hpp"

#include <cmath>
#include <stdexcept>

#include "perhor/series.hpp"

namespace perhor {

namespace {

void require_matching(const Signal& s, const AveragingParams& params, const char* who) {
    if (!s.grid.discount.same_as(params.discount))
        throw std::invalid_argument(std::string(who) + ": params discount does not match signal grid");
}

}  // namespace

PeriodSignal average_signal(const Signal& s, const AveragingParams& params) {
    require_matching(s, params, "average_signal");
    const Grid& g = s.grid;
    const double q = g.discount.q();
    std::vector<double> out(static_cast<size_t>(g.m) * s.dim, 0.0);

    if (s.tail == TailPolicy::ExactPeriodic) {
        // Anchor on the first period: the k >= 1 terms only carry the
        // deviation from it, and the geometric tail of the tiled period
        // cancels exactly. Tiled inputs come back bit-identical.
        for (int i = 0; i < g.m; ++i) {
            for (int c = 0; c < s.dim; ++c) {
                double acc = 0.0;
                double w = 1.0 - q;
                for (int k = 1; k < g.K; ++k) {
                    w *= q;
                    acc += w * (s.at(i + k * g.m, c) - s.at(i, c));
                }
                out[static_cast<size_t>(i) * s.dim + c] = s.at(i, c) + acc;
            }
        }
    } else {
        for (int i = 0; i < g.m; ++i) {
            for (int c = 0; c < s.dim; ++c) {
                double acc = 0.0;
                double w = 1.0 - q;
                for (int k = 0; k < g.K; ++k) {
                    acc += w * s.at(i + k * g.m, c);
                    w *= q;
                }
                out[static_cast<size_t>(i) * s.dim + c] = acc;
            }
        }
    }
    return PeriodSignal(g.discount, g.m, s.dim, std::move(out));
}

PeriodSignal average_tilde_signal(const Signal& s, const AveragingParams& params) {
    require_matching(s, params, "average_tilde_signal");
    const Grid& g = s.grid;
    const double q = g.discount.q();
    const double norm = (1.0 - q) * (1.0 - q) / q;
    std::vector<double> out(static_cast<size_t>(g.m) * s.dim, 0.0);

    if (s.tail == TailPolicy::ExactPeriodic) {
        // Same anchoring: norm * sum_k k q^k equals 1, so constants and
        // tiled periods are fixed points up to per-term rounding.
        for (int i = 0; i < g.m; ++i) {
            for (int c = 0; c < s.dim; ++c) {
                double acc = 0.0;
                double qk = 1.0;
                for (int k = 1; k < g.K; ++k) {
                    qk *= q;
                    acc += norm * k * qk * (s.at(i + k * g.m, c) - s.at(i, c));
                }
                out[static_cast<size_t>(i) * s.dim + c] = s.at(i, c) + acc;
            }
        }
    } else {
        for (int i = 0; i < g.m; ++i) {
            for (int c = 0; c < s.dim; ++c) {
                double acc = 0.0;
                double qk = 1.0;
                for (int k = 1; k < g.K; ++k) {
                    qk *= q;
                    acc += norm * k * qk * s.at(i + k * g.m, c);
                }
                out[static_cast<size_t>(i) * s.dim + c] = acc;
            }
        }
    }
    return PeriodSignal(g.discount, g.m, s.dim, std::move(out));
}

namespace {

// Value of the averaged signal at the right endpoint s = T, i.e. the
// series (1-q) sum_k q^k s((k+1) T), needed for an honest trapezoid of
// ||A s|| over [0, T].
double avg_endpoint_pow(const Signal& s, double alpha) {
    const Grid& g = s.grid;
    const double q = g.discount.q();
    std::vector<double> v(s.dim, 0.0);
    double w = 1.0 - q;  // (1-q) q^{j-1} at j = 1
    for (int j = 1; j < g.K; ++j) {
        for (int c = 0; c < s.dim; ++c) v[c] += w * s.at(j * g.m, c);
        w *= q;
    }
    if (s.tail == TailPolicy::ExactPeriodic) {
        // sum_{j>=K} (1-q) q^{j-1} tiles back to the first sample.
        const double tail = std::pow(q, g.K) / q;
        for (int c = 0; c < s.dim; ++c) v[c] += tail * s.at(0, c);
    }
    double n2 = 0.0;
    for (double x : v) n2 += x * x;
    return std::pow(std::sqrt(n2), alpha);
}

}  // namespace

OperatorNormReport operator_norm_check(const Signal& s, NormOrder alpha) {
    const Grid& g = s.grid;
    const double q = g.discount.q();
    const double dt = g.dt();

    const PeriodSignal avg = average_signal(s, AveragingParams(g.discount));

    auto node_pow = [&](int i) {
        double n2 = 0.0;
        for (int c = 0; c < avg.dim; ++c) n2 += avg.at(i, c) * avg.at(i, c);
        return std::pow(std::sqrt(n2), alpha.alpha);
    };
    double acc = 0.0;
    for (int i = 0; i + 1 < g.m; ++i) acc += 0.5 * dt * (node_pow(i) + node_pow(i + 1));
    acc += 0.5 * dt * (node_pow(g.m - 1) + avg_endpoint_pow(s, alpha.alpha));

    OperatorNormReport rep;
    rep.lhs = std::pow(acc, 1.0 / alpha.alpha);
    rep.rhs = std::pow((1.0 - q) / q, 1.0 / alpha.alpha) * weighted_lp_norm(s, alpha, s.tail);
    rep.slack = 10.0 * dt + 1e-12;
    rep.ok = rep.lhs <= rep.rhs * (1.0 + rep.slack);
    return rep;
}

}  // namespace perhor
