#include "perhor/decomposition.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "perhor/norms.hpp"
#include "perhor/series.hpp"

namespace perhor {

PeriodicProjection project_periodic(const Signal& x) {
    PeriodSignal period = average_signal(x, AveragingParams(x.grid.discount));
    Signal lifted = periodic_extend(period, x.grid.K);
    return {std::move(period), std::move(lifted)};
}

double orthogonality_residual(const Signal& x) {
    const Grid& g = x.grid;
    const double q = g.discount.q();
    double worst = 0.0;
    for (int i = 0; i < g.m; ++i) {
        double n2 = 0.0;
        for (int c = 0; c < x.dim; ++c) {
            double acc = 0.0;
            double qk = 1.0;
            for (int k = 0; k < g.K; ++k) {
                acc += qk * x.at(i + k * g.m, c);
                qk *= q;
            }
            if (x.tail == TailPolicy::ExactPeriodic)
                acc += std::pow(q, g.K) / (1.0 - q) * x.at(i, c);
            n2 += acc * acc;
        }
        worst = std::max(worst, std::sqrt(n2));
    }
    return worst;
}

namespace {

// k-moments of the objective's weights for the signal's tail policy:
// truncated at K periods under ZeroExtend, full series under
// ExactPeriodic.
GeometricMoments objective_moments(const Signal& x) {
    const double q = x.grid.discount.q();
    if (x.tail == TailPolicy::ExactPeriodic) return full_moments(q);
    return partial_moments(q, x.grid.K);
}

// Per-residue data sums X_i = sum_k q^k x_{i+km}, Y_i = sum_k k q^k
// x_{i+km}, continued per the tail policy (a tiled first period adds its
// geometric tail). Layout: [i * dim + c].
void data_sums(const Signal& x, std::vector<double>& X, std::vector<double>& Y) {
    const Grid& g = x.grid;
    const double q = g.discount.q();
    X.assign(static_cast<size_t>(g.m) * x.dim, 0.0);
    Y.assign(static_cast<size_t>(g.m) * x.dim, 0.0);
    for (int i = 0; i < g.m; ++i) {
        for (int c = 0; c < x.dim; ++c) {
            double sx = 0.0, sy = 0.0;
            double qk = 1.0;
            for (int k = 0; k < g.K; ++k) {
                const double v = x.at(i + k * g.m, c);
                sx += qk * v;
                sy += k * qk * v;
                qk *= q;
            }
            if (x.tail == TailPolicy::ExactPeriodic) {
                const GeometricMoments tail = tail_moments(q, g.K);
                sx += tail.s0 * x.at(i, c);
                sy += tail.s1 * x.at(i, c);
            }
            X[static_cast<size_t>(i) * x.dim + c] = sx;
            Y[static_cast<size_t>(i) * x.dim + c] = sy;
        }
    }
}

void require_trend_identifiable(const Signal& x) {
    if (x.tail == TailPolicy::ZeroExtend && x.grid.K < 2)
        throw std::invalid_argument(
            "decompose: a single stored period under zero-extension cannot "
            "identify a trend (need K >= 2 or an exact-periodic tail)");
}

}  // namespace

Decomposition decompose(const Signal& x) {
    require_trend_identifiable(x);
    const Grid& g = x.grid;
    const double T = g.discount.T;
    const GeometricMoments S = objective_moments(x);
    const double ratio = S.s1 / S.s0;           // weighted mean period index
    const double disp = S.s2 - S.s1 * S.s1 / S.s0;  // its weighted dispersion

    std::vector<double> X, Y;
    data_sums(x, X, Y);

    const std::vector<double> w = period_profile_weights(g.discount, g.m);
    double wsum = 0.0;
    for (double wi : w) wsum += wi;

    // Trend slope: the weighted residue-average of the k-detrended data
    // sums. In the continuum limit this is (r/T) * integral of
    // e^{-rs} (A~x - A x) ds.
    std::vector<double> a(x.dim, 0.0);
    for (int c = 0; c < x.dim; ++c) {
        double num = 0.0;
        for (int i = 0; i < g.m; ++i)
            num += w[i] * (Y[static_cast<size_t>(i) * x.dim + c] -
                           ratio * X[static_cast<size_t>(i) * x.dim + c]);
        a[c] = num / (T * disp * wsum);
    }

    // Seasonal part: the per-residue weighted mean of the detrended data.
    std::vector<double> pvals(static_cast<size_t>(g.m) * x.dim);
    for (int i = 0; i < g.m; ++i) {
        const double s = g.time(i);
        for (int c = 0; c < x.dim; ++c)
            pvals[static_cast<size_t>(i) * x.dim + c] =
                X[static_cast<size_t>(i) * x.dim + c] / S.s0 - a[c] * s - a[c] * T * ratio;
    }
    PeriodSignal p(g.discount, g.m, x.dim, std::move(pvals));
    const double energy = decomposition_energy(x, p, a);
    return {std::move(p), std::move(a), energy};
}

double decomposition_energy(const Signal& x, const PeriodSignal& p,
                            std::span<const double> a) {
    const Grid& g = x.grid;
    if (p.m != g.m || p.dim != x.dim || static_cast<int>(a.size()) != x.dim)
        throw std::invalid_argument("decomposition_energy: shape mismatch");
    const double q = g.discount.q();
    const double T = g.discount.T;
    const std::vector<double> w = period_profile_weights(g.discount, g.m);

    double acc = 0.0;
    for (int k = 0; k < g.K; ++k) {
        const double qk = std::pow(q, k);
        for (int i = 0; i < g.m; ++i) {
            const double t = g.time(i + k * g.m);
            double r2 = 0.0;
            for (int c = 0; c < x.dim; ++c) {
                const double r = x.at(i + k * g.m, c) - p.at(i, c) - t * a[c];
                r2 += r * r;
            }
            acc += w[i] * qk * r2;
        }
    }

    if (x.tail == TailPolicy::ExactPeriodic) {
        // Residual beyond the horizon: u_i - k T a with
        // u_i = x0_i - p_i - s_i a, summed in closed form.
        const GeometricMoments tail = tail_moments(q, g.K);
        for (int i = 0; i < g.m; ++i) {
            const double s = g.time(i);
            double u2 = 0.0, ua = 0.0, a2 = 0.0;
            for (int c = 0; c < x.dim; ++c) {
                const double u = x.at(i, c) - p.at(i, c) - s * a[c];
                u2 += u * u;
                ua += u * a[c];
                a2 += a[c] * a[c];
            }
            acc += w[i] * (tail.s0 * u2 - 2.0 * T * tail.s1 * ua + T * T * tail.s2 * a2);
        }
    }
    return acc;
}

Decomposition decompose_oracle(const Signal& x) {
    require_trend_identifiable(x);
    const Grid& g = x.grid;
    const int n = x.dim;
    const long unknowns = static_cast<long>(g.m) * n + n;
    if (unknowns > 10000)
        throw std::invalid_argument("decompose_oracle: m*n + n exceeds 10^4 unknowns");

    const double q = g.discount.q();
    const std::vector<double> w = period_profile_weights(g.discount, g.m);

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(unknowns, unknowns);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(unknowns);
    const long a_base = static_cast<long>(g.m) * n;

    auto accumulate = [&](int i, double t, double weight, const double* data) {
        for (int c = 0; c < n; ++c) {
            const long pi = static_cast<long>(i) * n + c;
            const long ac = a_base + c;
            M(pi, pi) += weight;
            M(pi, ac) += weight * t;
            M(ac, pi) += weight * t;
            M(ac, ac) += weight * t * t;
            b(pi) += weight * data[c];
            b(ac) += weight * t * data[c];
        }
    };

    for (int k = 0; k < g.K; ++k) {
        const double qk = std::pow(q, k);
        for (int i = 0; i < g.m; ++i)
            accumulate(i, g.time(i + k * g.m), w[i] * qk,
                       x.values.data() + static_cast<size_t>(i + k * g.m) * n);
    }

    if (x.tail == TailPolicy::ExactPeriodic) {
        // Brute-force tail: keep adding tiled periods until their weight
        // is lost in the accumulated diagonal. No series identities here;
        // this side of the check has to stay dumb.
        const long cap = 5000000;
        double qk = std::pow(q, g.K);
        bool settled = false;
        for (long k = g.K; k < g.K + cap; ++k) {
            double delta = 0.0;
            for (int i = 0; i < g.m; ++i) {
                const double t = g.time(i % g.m) + static_cast<double>(k) * g.discount.T;
                accumulate(i, t, w[i] * qk, x.values.data() + static_cast<size_t>(i) * n);
                delta += w[i] * qk * t * t;
            }
            qk *= q;
            if (delta < 1e-18 * M(a_base, a_base)) {
                settled = true;
                break;
            }
        }
        if (!settled)
            throw std::runtime_error("decompose_oracle: tail accumulation did not settle");
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
    const Eigen::VectorXd D = ldlt.vectorD();
    const double dmax = D.cwiseAbs().maxCoeff();
    const double dmin = D.cwiseAbs().minCoeff();
    if (!(dmin > 1e-12 * dmax))
        throw std::runtime_error(
            "decompose_oracle: singular normal matrix (near-degenerate discount/period "
            "combination)");
    const Eigen::VectorXd z = ldlt.solve(b);

    std::vector<double> pvals(static_cast<size_t>(g.m) * n);
    for (long idx = 0; idx < a_base; ++idx) pvals[static_cast<size_t>(idx)] = z(idx);
    std::vector<double> a(n);
    for (int c = 0; c < n; ++c) a[c] = z(a_base + c);

    PeriodSignal p(g.discount, g.m, n, std::move(pvals));
    const double energy = decomposition_energy(x, p, a);
    return {std::move(p), std::move(a), energy};
}

}  // namespace perhor
