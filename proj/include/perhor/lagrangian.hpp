#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace perhor {

using StateSpan = std::span<const double>;

/// Optional growth/coercivity data attached to a Lagrangian, used by the
/// runtime spot checks and by the series truncation as an a-priori tail
/// bound: c0 |y|^alpha <= L(t,x,y) <= c1 (1 + |y|^alpha), L >= rho(y),
/// |D2 L| + |D3 L| <= growth_M(R) (1 + |y|^2) for |x|^2 + |y|^2 <= R^2.
struct GrowthMeta {
    std::optional<double> c0;
    std::optional<double> c1;
    std::optional<double> alpha;
    std::function<double(StateSpan y)> rho;
    std::function<double(double R)> growth_M;
};

/// Evaluable integrand L(t, x, y) with optional first partials and
/// optional Hessian in y. Gradients write into caller-owned spans:
/// grad(t, x, y, d_t, d_x, d_y); hess_yy fills an n*n row-major block.
struct Lagrangian {
    int dim = 1;
    std::string name = "lagrangian";

    std::function<double(double t, StateSpan x, StateSpan y)> value;
    std::function<void(double t, StateSpan x, StateSpan y, double& d_t,
                       std::span<double> d_x, std::span<double> d_y)>
        grad;
    std::function<void(double t, StateSpan x, StateSpan y, std::span<double> h)> hess_yy;

    /// Set when L(t+T, x, y) = L(t, x, y) for the working period
    /// (autonomous integrands included); averaging is then the identity.
    bool periodic_in_t = false;

    GrowthMeta meta;

    bool has_grad() const { return static_cast<bool>(grad); }
    bool has_hess() const { return static_cast<bool>(hess_yy); }
};

/// Result of spot-checking supplied analytic partials against central
/// finite differences of `value` at random points.
struct GradientValidation {
    bool ok = true;
    double max_rel_err = 0.0;
    double worst_t = 0.0;
    std::vector<double> worst_x, worst_y;
};

/// Compares grad against central differences (step 1e-5 * scale) at
/// `samples` random points in [0, t_max] x [-box, box]^{2n}; flags any
/// relative error above 1e-5.
GradientValidation validate_gradients(const Lagrangian& L, int samples,
                                      unsigned long long seed = 1234,
                                      double t_max = 10.0, double box = 3.0);

}  // namespace perhor
