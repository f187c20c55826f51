#include "perhor/lagrangian.hpp"

#include <cmath>
#include <stdexcept>

#include "perhor/rng.hpp"

namespace perhor {

GradientValidation validate_gradients(const Lagrangian& L, int samples,
                                      unsigned long long seed, double t_max, double box) {
    if (!L.has_grad())
        throw std::invalid_argument("validate_gradients: Lagrangian has no gradient");

    Rng rng(seed);
    const int n = L.dim;
    GradientValidation out;
    std::vector<double> x(n), y(n), dx(n), dy(n), pert(n);

    auto rel = [](double a, double b) {
        return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
    };

    for (int s = 0; s < samples; ++s) {
        const double t = rng.uniform(0.0, t_max);
        for (int c = 0; c < n; ++c) x[c] = rng.uniform(-box, box);
        for (int c = 0; c < n; ++c) y[c] = rng.uniform(-box, box);

        double d_t;
        L.grad(t, x, y, d_t, dx, dy);

        double worst = 0.0;
        {
            const double h = 1e-5 * std::max(1.0, std::abs(t));
            const double fd = (L.value(t + h, x, y) - L.value(std::max(0.0, t - h), x, y)) /
                              (t - h >= 0.0 ? 2.0 * h : h);
            worst = std::max(worst, rel(d_t, fd));
        }
        for (int c = 0; c < n; ++c) {
            const double h = 1e-5 * std::max(1.0, std::abs(x[c]));
            pert = x;
            pert[c] = x[c] + h;
            const double fp = L.value(t, pert, y);
            pert[c] = x[c] - h;
            const double fm = L.value(t, pert, y);
            worst = std::max(worst, rel(dx[c], (fp - fm) / (2.0 * h)));
        }
        for (int c = 0; c < n; ++c) {
            const double h = 1e-5 * std::max(1.0, std::abs(y[c]));
            pert = y;
            pert[c] = y[c] + h;
            const double fp = L.value(t, x, pert);
            pert[c] = y[c] - h;
            const double fm = L.value(t, x, pert);
            worst = std::max(worst, rel(dy[c], (fp - fm) / (2.0 * h)));
        }

        if (worst > out.max_rel_err) {
            out.max_rel_err = worst;
            out.worst_t = t;
            out.worst_x = x;
            out.worst_y = y;
        }
    }
    out.ok = out.max_rel_err < 1e-5;
    return out;
}

}  // namespace perhor
