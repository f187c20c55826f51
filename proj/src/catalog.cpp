#include "perhor/catalog.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace perhor {

namespace {

double sq_norm(StateSpan v) {
    double s = 0.0;
    for (double a : v) s += a * a;
    return s;
}

void fill_identity_scaled(std::span<double> h, int n, double c) {
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) h[static_cast<size_t>(i) * n + j] = (i == j) ? c : 0.0;
}

}  // namespace

Lagrangian make_dirichlet(int dim) {
    Lagrangian L;
    L.dim = dim;
    L.name = "dirichlet";
    L.periodic_in_t = true;
    L.value = [](double, StateSpan, StateSpan y) { return sq_norm(y); };
    L.grad = [dim](double, StateSpan, StateSpan y, double& d_t, std::span<double> d_x,
                   std::span<double> d_y) {
        d_t = 0.0;
        for (int c = 0; c < dim; ++c) d_x[c] = 0.0;
        for (int c = 0; c < dim; ++c) d_y[c] = 2.0 * y[c];
    };
    L.hess_yy = [dim](double, StateSpan, StateSpan, std::span<double> h) {
        fill_identity_scaled(h, dim, 2.0);
    };
    L.meta.c0 = 1.0;
    L.meta.c1 = 1.0;
    L.meta.alpha = 2.0;
    return L;
}

Lagrangian make_quadratic(int dim) {
    Lagrangian L;
    L.dim = dim;
    L.name = "quadratic";
    L.periodic_in_t = true;
    L.value = [](double, StateSpan x, StateSpan y) { return sq_norm(y) + sq_norm(x); };
    L.grad = [dim](double, StateSpan x, StateSpan y, double& d_t, std::span<double> d_x,
                   std::span<double> d_y) {
        d_t = 0.0;
        for (int c = 0; c < dim; ++c) d_x[c] = 2.0 * x[c];
        for (int c = 0; c < dim; ++c) d_y[c] = 2.0 * y[c];
    };
    L.hess_yy = [dim](double, StateSpan, StateSpan, std::span<double> h) {
        fill_identity_scaled(h, dim, 2.0);
    };
    L.meta.c0 = 1.0;
    L.meta.alpha = 2.0;
    return L;
}

Lagrangian make_tracking(int dim, double T, const CatalogParams& p) {
    if (!(T > 0.0)) throw std::invalid_argument("make_tracking: T must be > 0");
    const double w = 2.0 * std::numbers::pi / T;
    auto phi = [p, w](double t) {
        return p.offset + p.amp_cos * std::cos(w * t) + p.amp_sin * std::sin(w * t);
    };
    auto dphi = [p, w](double t) {
        return w * (-p.amp_cos * std::sin(w * t) + p.amp_sin * std::cos(w * t));
    };

    Lagrangian L;
    L.dim = dim;
    L.name = "tracking";
    L.periodic_in_t = true;
    L.value = [phi](double t, StateSpan x, StateSpan y) {
        const double f = phi(t);
        double s = 0.0;
        for (double a : x) s += (a - f) * (a - f);
        return sq_norm(y) + s;
    };
    L.grad = [phi, dphi, dim](double t, StateSpan x, StateSpan y, double& d_t,
                              std::span<double> d_x, std::span<double> d_y) {
        const double f = phi(t);
        d_t = 0.0;
        for (int c = 0; c < dim; ++c) d_t += -2.0 * (x[c] - f) * dphi(t);
        for (int c = 0; c < dim; ++c) d_x[c] = 2.0 * (x[c] - f);
        for (int c = 0; c < dim; ++c) d_y[c] = 2.0 * y[c];
    };
    L.hess_yy = [dim](double, StateSpan, StateSpan, std::span<double> h) {
        fill_identity_scaled(h, dim, 2.0);
    };
    L.meta.c0 = 1.0;
    L.meta.alpha = 2.0;
    return L;
}

Lagrangian make_modulated(int dim, const CatalogParams& p) {
    const double kappa = p.kappa;
    if (!(kappa > 0.0)) throw std::invalid_argument("make_modulated: kappa must be > 0");

    Lagrangian L;
    L.dim = dim;
    L.name = "modulated";
    L.value = [kappa](double t, StateSpan x, StateSpan y) {
        return sq_norm(y) + std::exp(-kappa * t) * (1.0 + sq_norm(x));
    };
    L.grad = [kappa, dim](double t, StateSpan x, StateSpan y, double& d_t,
                          std::span<double> d_x, std::span<double> d_y) {
        const double e = std::exp(-kappa * t);
        d_t = -kappa * e * (1.0 + sq_norm(x));
        for (int c = 0; c < dim; ++c) d_x[c] = 2.0 * e * x[c];
        for (int c = 0; c < dim; ++c) d_y[c] = 2.0 * y[c];
    };
    L.hess_yy = [dim](double, StateSpan, StateSpan, std::span<double> h) {
        fill_identity_scaled(h, dim, 2.0);
    };
    L.meta.c0 = 1.0;
    L.meta.alpha = 2.0;
    return L;
}

Lagrangian make_catalog_lagrangian(const std::string& name, int dim, double T,
                                   const CatalogParams& p) {
    if (name == "dirichlet") return make_dirichlet(dim);
    if (name == "quadratic") return make_quadratic(dim);
    if (name == "tracking") return make_tracking(dim, T, p);
    if (name == "modulated") return make_modulated(dim, p);
    throw std::invalid_argument("unknown Lagrangian '" + name +
                                "' (have: dirichlet, quadratic, tracking, modulated)");
}

}  // namespace perhor
