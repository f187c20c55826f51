#include "perhor/signal.hpp"

#include <cmath>
#include <stdexcept>

namespace perhor {

namespace {

void check_finite(const std::vector<double>& vals, const char* what) {
    for (double v : vals)
        if (!std::isfinite(v))
            throw std::invalid_argument(std::string(what) + ": samples must be finite");
}

}  // namespace

Signal::Signal(Grid g, int n, std::vector<double> vals, TailPolicy tp)
    : grid(g), dim(n), tail(tp), values(std::move(vals)) {
    if (dim < 1) throw std::invalid_argument("Signal: dim must be >= 1");
    if (values.size() != static_cast<size_t>(grid.num_nodes()) * dim)
        throw std::invalid_argument("Signal: expected m*K*dim values");
    check_finite(values, "Signal");
}

Signal Signal::from_function(Grid g, int n,
                             const std::function<void(double, std::span<double>)>& fn,
                             TailPolicy tp) {
    std::vector<double> vals(static_cast<size_t>(g.num_nodes()) * n);
    for (int j = 0; j < g.num_nodes(); ++j)
        fn(g.time(j), {vals.data() + static_cast<size_t>(j) * n, static_cast<size_t>(n)});
    return Signal(g, n, std::move(vals), tp);
}

Signal Signal::from_scalar_function(Grid g, const std::function<double(double)>& fn,
                                    TailPolicy tp) {
    return from_function(
        g, 1, [&](double t, std::span<double> out) { out[0] = fn(t); }, tp);
}

PeriodSignal::PeriodSignal(DiscountConfig d, int m_, int n, std::vector<double> vals)
    : discount(d), m(m_), dim(n), values(std::move(vals)) {
    if (m < 2) throw std::invalid_argument("PeriodSignal: need m >= 2");
    if (dim < 1) throw std::invalid_argument("PeriodSignal: dim must be >= 1");
    if (values.size() != static_cast<size_t>(m) * dim)
        throw std::invalid_argument("PeriodSignal: expected m*dim values");
    check_finite(values, "PeriodSignal");
}

PeriodSignal PeriodSignal::from_function(
    DiscountConfig d, int m, int n,
    const std::function<void(double, std::span<double>)>& fn) {
    std::vector<double> vals(static_cast<size_t>(m) * n);
    const double dt = d.T / m;
    for (int i = 0; i < m; ++i)
        fn(i * dt, {vals.data() + static_cast<size_t>(i) * n, static_cast<size_t>(n)});
    return PeriodSignal(d, m, n, std::move(vals));
}

PeriodSignal PeriodSignal::from_scalar_function(DiscountConfig d, int m,
                                                const std::function<double(double)>& fn) {
    return from_function(d, m, 1, [&](double t, std::span<double> out) { out[0] = fn(t); });
}

PeriodSignal PeriodSignal::zeros(DiscountConfig d, int m, int n) {
    return PeriodSignal(d, m, n, std::vector<double>(static_cast<size_t>(m) * n, 0.0));
}

Signal periodic_extend(const PeriodSignal& p, int K) {
    if (K < 1) throw std::invalid_argument("periodic_extend: need K >= 1");
    Grid g = make_grid(p.discount, p.m, K);
    std::vector<double> vals(static_cast<size_t>(g.num_nodes()) * p.dim);
    const size_t period_len = static_cast<size_t>(p.m) * p.dim;
    for (int k = 0; k < K; ++k)
        std::copy(p.values.begin(), p.values.end(), vals.begin() + k * period_len);
    return Signal(g, p.dim, std::move(vals), TailPolicy::ExactPeriodic);
}

PeriodSignal restrict_to_period(const Signal& s) {
    std::vector<double> vals(s.values.begin(),
                             s.values.begin() + static_cast<size_t>(s.grid.m) * s.dim);
    return PeriodSignal(s.grid.discount, s.grid.m, s.dim, std::move(vals));
}

namespace {

// 2nd-order stencils on a flat node-major array of `count` nodes.
std::vector<double> diff_nodes(const std::vector<double>& v, int count, int dim, double dt) {
    if (count < 3)
        throw std::invalid_argument("finite_diff_derivative: need at least 3 samples");
    std::vector<double> out(v.size());
    auto at = [&](int j, int c) { return v[static_cast<size_t>(j) * dim + c]; };
    for (int c = 0; c < dim; ++c) {
        out[c] = (-3.0 * at(0, c) + 4.0 * at(1, c) - at(2, c)) / (2.0 * dt);
        for (int j = 1; j + 1 < count; ++j)
            out[static_cast<size_t>(j) * dim + c] = (at(j + 1, c) - at(j - 1, c)) / (2.0 * dt);
        out[static_cast<size_t>(count - 1) * dim + c] =
            (3.0 * at(count - 1, c) - 4.0 * at(count - 2, c) + at(count - 3, c)) / (2.0 * dt);
    }
    return out;
}

}  // namespace

Signal finite_diff_derivative(const Signal& s) {
    return Signal(s.grid, s.dim, diff_nodes(s.values, s.grid.num_nodes(), s.dim, s.grid.dt()),
                  s.tail);
}

PeriodSignal finite_diff_derivative(const PeriodSignal& p) {
    return PeriodSignal(p.discount, p.m, p.dim, diff_nodes(p.values, p.m, p.dim, p.dt()));
}

}  // namespace perhor
