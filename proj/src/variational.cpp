#include "perhor/variational.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "perhor/rng.hpp"

namespace perhor {

namespace {

double sq_norm(StateSpan v) {
    double s = 0.0;
    for (double a : v) s += a * a;
    return s;
}

double inf_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double a : v) s = std::max(s, std::abs(a));
    return s;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

double FiniteHorizonProblem::prefactor() const {
    return weight_in_objective ? 1.0 / (1.0 - discount().q()) : 1.0;
}

double FiniteHorizonProblem::integrand(double s, StateSpan x, StateSpan y) const {
    const double v = averaged.value(s, x, y);
    const double lam = weight_in_objective ? std::exp(-discount().r * s) * v : v;
    if (!std::isfinite(lam))
        throw std::runtime_error("objective integrand is not finite at s = " +
                                 std::to_string(s));
    return lam;
}

void FiniteHorizonProblem::integrand_grad(double s, StateSpan x, StateSpan y, double& d_s,
                                          std::span<double> d_x,
                                          std::span<double> d_y) const {
    const int n = dim();
    if (averaged.has_grad()) {
        averaged.grad(s, x, y, d_s, d_x, d_y);
        if (weight_in_objective) {
            const double r = discount().r;
            const double w = std::exp(-r * s);
            const double v = averaged.value(s, x, y);
            d_s = w * (d_s - r * v);
            for (int c = 0; c < n; ++c) d_x[c] *= w;
            for (int c = 0; c < n; ++c) d_y[c] *= w;
        }
        return;
    }
    // Finite-difference fallback on the effective integrand.
    std::vector<double> px(x.begin(), x.end()), py(y.begin(), y.end());
    {
        const double h = 1e-6 * std::max(1.0, std::abs(s));
        d_s = (integrand(s + h, x, y) - integrand(std::max(0.0, s - h), x, y)) /
              (s - h >= 0.0 ? 2.0 * h : h);
    }
    for (int c = 0; c < n; ++c) {
        const double h = 1e-6 * std::max(1.0, std::abs(x[c]));
        px[c] = x[c] + h;
        const double fp = integrand(s, px, y);
        px[c] = x[c] - h;
        const double fm = integrand(s, px, y);
        px[c] = x[c];
        d_x[c] = (fp - fm) / (2.0 * h);
    }
    for (int c = 0; c < n; ++c) {
        const double h = 1e-6 * std::max(1.0, std::abs(y[c]));
        py[c] = y[c] + h;
        const double fp = integrand(s, x, py);
        py[c] = y[c] - h;
        const double fm = integrand(s, x, py);
        py[c] = y[c];
        d_y[c] = (fp - fm) / (2.0 * h);
    }
}

FiniteHorizonProblem reduce_problem(Lagrangian L, const DiscountConfig& discount,
                                    std::vector<double> eta, const AveragingParams& params,
                                    bool weight_in_objective) {
    if (!params.discount.same_as(discount))
        throw std::invalid_argument("reduce_problem: params discount mismatch");
    if (static_cast<int>(eta.size()) != L.dim)
        throw std::invalid_argument("reduce_problem: eta size must equal the Lagrangian dim");
    return FiniteHorizonProblem{AveragedLagrangian(std::move(L), params), std::move(eta),
                                weight_in_objective};
}

Trajectory::Trajectory(DiscountConfig d, int m_, std::vector<double> eta_)
    : discount(d), m(m_), dim(static_cast<int>(eta_.size())), eta(std::move(eta_)) {
    if (m < 2) throw std::invalid_argument("Trajectory: need m >= 2");
    if (dim < 1) throw std::invalid_argument("Trajectory: eta must be nonempty");
    values.assign(static_cast<size_t>(m + 1) * dim, 0.0);
    for (int j = 0; j <= m; ++j)
        for (int c = 0; c < dim; ++c) values[static_cast<size_t>(j) * dim + c] = eta[c];
}

namespace {

// Cell-midpoint transcription of the reduced objective over the interior
// nodes; boundary nodes never enter the unknown vector.
class Transcription {
  public:
    Transcription(const FiniteHorizonProblem& prob, int m)
        : prob_(prob), m_(m), n_(prob.dim()), dt_(prob.discount().T / m) {}

    int free_size() const { return (m_ - 1) * n_; }

    // Full nodal array (m+1)*n from the free interior block.
    std::vector<double> assemble(const std::vector<double>& z) const {
        std::vector<double> u(static_cast<size_t>(m_ + 1) * n_);
        for (int c = 0; c < n_; ++c) {
            u[c] = prob_.eta[c];
            u[static_cast<size_t>(m_) * n_ + c] = prob_.eta[c];
        }
        std::copy(z.begin(), z.end(), u.begin() + n_);
        return u;
    }

    double objective_nodes(const std::vector<double>& u) const {
        std::vector<double> xm(n_), y(n_);
        double acc = 0.0;
        for (int j = 0; j < m_; ++j) {
            cell(u, j, xm, y);
            acc += dt_ * prob_.integrand((j + 0.5) * dt_, xm, y);
        }
        return prob_.prefactor() * acc;
    }

    double objective(const std::vector<double>& z) const {
        return objective_nodes(assemble(z));
    }

    std::vector<double> gradient_nodes(const std::vector<double>& u) const {
        std::vector<double> g(static_cast<size_t>(m_ + 1) * n_, 0.0);
        std::vector<double> xm(n_), y(n_), dx(n_), dy(n_);
        const double pref = prob_.prefactor();
        for (int j = 0; j < m_; ++j) {
            cell(u, j, xm, y);
            double ds;
            prob_.integrand_grad((j + 0.5) * dt_, xm, y, ds, dx, dy);
            for (int c = 0; c < n_; ++c) {
                g[static_cast<size_t>(j) * n_ + c] += pref * (dt_ * 0.5 * dx[c] - dy[c]);
                g[static_cast<size_t>(j + 1) * n_ + c] += pref * (dt_ * 0.5 * dx[c] + dy[c]);
            }
        }
        return g;
    }

    std::vector<double> gradient(const std::vector<double>& z) const {
        const std::vector<double> g = gradient_nodes(assemble(z));
        return {g.begin() + n_, g.end() - n_};
    }

    double dt() const { return dt_; }

  private:
    void cell(const std::vector<double>& u, int j, std::vector<double>& xm,
              std::vector<double>& y) const {
        for (int c = 0; c < n_; ++c) {
            const double a = u[static_cast<size_t>(j) * n_ + c];
            const double b = u[static_cast<size_t>(j + 1) * n_ + c];
            xm[c] = 0.5 * (a + b);
            y[c] = (b - a) / dt_;
        }
    }

    const FiniteHorizonProblem& prob_;
    int m_, n_;
    double dt_;
};

struct StartResult {
    std::vector<double> z;
    double objective = std::numeric_limits<double>::infinity();
    double grad_norm = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
    std::vector<double> history;
};

StartResult minimize_from(const Transcription& trans, std::vector<double> z,
                          const SolveOptions& opts) {
    StartResult res;
    const size_t dim = z.size();

    double f = trans.objective(z);
    std::vector<double> g = trans.gradient(z);
    res.history.push_back(f);

    std::deque<std::pair<std::vector<double>, std::vector<double>>> pairs;  // (step, dgrad)
    std::vector<double> d(dim), z_new(dim), g_new(dim);

    auto lbfgs_direction = [&]() {
        d.assign(g.begin(), g.end());
        std::vector<double> alpha(pairs.size());
        for (size_t idx = pairs.size(); idx-- > 0;) {
            const auto& [sv, yv] = pairs[idx];
            const double rho = 1.0 / dot(yv, sv);
            alpha[idx] = rho * dot(sv, d);
            for (size_t i = 0; i < dim; ++i) d[i] -= alpha[idx] * yv[i];
        }
        if (!pairs.empty()) {
            const auto& [sv, yv] = pairs.back();
            const double gamma = dot(sv, yv) / dot(yv, yv);
            for (auto& v : d) v *= gamma;
        }
        for (size_t idx = 0; idx < pairs.size(); ++idx) {
            const auto& [sv, yv] = pairs[idx];
            const double rho = 1.0 / dot(yv, sv);
            const double beta = rho * dot(yv, d);
            for (size_t i = 0; i < dim; ++i) d[i] += sv[i] * (alpha[idx] - beta);
        }
        for (auto& v : d) v = -v;
    };

    // Backtracking Armijo; returns the accepted step or 0 on failure.
    auto line_search = [&](double gd, double t0) -> double {
        double t = t0;
        for (int ls = 0; ls < opts.max_line_steps; ++ls) {
            for (size_t i = 0; i < dim; ++i) z_new[i] = z[i] + t * d[i];
            const double f_trial = trans.objective(z_new);
            if (f_trial <= f + opts.armijo * t * gd) {
                f = f_trial;
                return t;
            }
            t *= opts.backtrack;
        }
        return 0.0;
    };

    double gd_step_hint = 1.0;
    int iter = 0;
    for (; iter < opts.max_iters; ++iter) {
        res.grad_norm = inf_norm(g);
        if (res.grad_norm <= opts.grad_tol) {
            res.converged = true;
            break;
        }

        bool quasi = opts.quasi_newton && !pairs.empty();
        if (quasi)
            lbfgs_direction();
        else
            for (size_t i = 0; i < dim; ++i) d[i] = -g[i];

        double gd = dot(g, d);
        if (gd >= 0.0) {  // not a descent direction: fall back to steepest
            for (size_t i = 0; i < dim; ++i) d[i] = -g[i];
            gd = dot(g, d);
            quasi = false;
        }

        double t = line_search(gd, quasi ? 1.0 : gd_step_hint);
        if (t == 0.0 && quasi) {
            for (size_t i = 0; i < dim; ++i) d[i] = -g[i];
            gd = dot(g, d);
            quasi = false;
            t = line_search(gd, gd_step_hint);
        }
        if (t == 0.0) break;  // stalled below line-search resolution
        if (!quasi) gd_step_hint = std::max(t / opts.backtrack, 1e-12);

        g_new = trans.gradient(z_new);
        std::vector<double> sv(dim), yv(dim);
        for (size_t i = 0; i < dim; ++i) {
            sv[i] = z_new[i] - z[i];
            yv[i] = g_new[i] - g[i];
        }
        const double sy = dot(sv, yv);
        if (opts.quasi_newton && sy > 1e-12 * std::sqrt(dot(sv, sv)) * std::sqrt(dot(yv, yv))) {
            pairs.emplace_back(std::move(sv), std::move(yv));
            if (static_cast<int>(pairs.size()) > opts.memory) pairs.pop_front();
        }
        z.swap(z_new);
        g.swap(g_new);
        res.history.push_back(f);
    }

    res.grad_norm = inf_norm(g);
    res.converged = res.converged || res.grad_norm <= opts.grad_tol;
    res.z = std::move(z);
    res.objective = f;
    res.iterations = iter;
    return res;
}

double el_residual_max(const Trajectory& u, const FiniteHorizonProblem& prob);

}  // namespace

SolveResult solve_finite_horizon(const FiniteHorizonProblem& prob, int m,
                                 const SolveOptions& opts) {
    if (m < 2) throw std::invalid_argument("solve_finite_horizon: need m >= 2");
    if (opts.grad_tol <= 0.0 || opts.max_iters < 1 || opts.multistart < 1)
        throw std::invalid_argument("solve_finite_horizon: bad options");

    const Transcription trans(prob, m);
    const int n = prob.dim();
    const double T = prob.discount().T;

    double eta_scale = 0.0;
    for (double e : prob.eta) eta_scale = std::max(eta_scale, std::abs(e));
    const double spread = opts.start_spread > 0.0 ? opts.start_spread : 0.25 * (1.0 + eta_scale);

    auto make_start = [&](int index) {
        std::vector<double> z(static_cast<size_t>(trans.free_size()));
        for (int j = 1; j < m; ++j)
            for (int c = 0; c < n; ++c)
                z[static_cast<size_t>(j - 1) * n + c] = prob.eta[c];
        if (index > 0) {
            Rng rng(opts.seed * 1000003ull + static_cast<unsigned long long>(index));
            for (int c = 0; c < n; ++c) {
                const double a1 = spread * rng.normal();
                const double a2 = spread * rng.normal();
                for (int j = 1; j < m; ++j) {
                    const double s = j * T / m;
                    z[static_cast<size_t>(j - 1) * n + c] +=
                        a1 * std::sin(std::numbers::pi * s / T) +
                        a2 * std::sin(2.0 * std::numbers::pi * s / T);
                }
            }
        }
        return z;
    };

    auto to_trajectory = [&](const std::vector<double>& z) {
        Trajectory u(prob.discount(), m, prob.eta);
        const std::vector<double> full = trans.assemble(z);
        u.values = full;
        return u;
    };

    int best = -1;
    StartResult best_res;
    double best_el = std::numeric_limits<double>::infinity();
    for (int sidx = 0; sidx < opts.multistart; ++sidx) {
        StartResult r = minimize_from(trans, make_start(sidx), opts);
        bool take = best < 0;
        if (!take) {
            if (r.objective < best_res.objective - 1e-12) {
                take = true;
            } else if (std::abs(r.objective - best_res.objective) <= 1e-12) {
                const double el = el_residual_max(to_trajectory(r.z), prob);
                if (best_el == std::numeric_limits<double>::infinity())
                    best_el = el_residual_max(to_trajectory(best_res.z), prob);
                if (el < best_el) {
                    take = true;
                    best_el = el;
                }
            }
        }
        if (take) {
            if (best >= 0 && r.objective < best_res.objective - 1e-12)
                best_el = std::numeric_limits<double>::infinity();
            best = sidx;
            best_res = std::move(r);
        }
    }

    SolveResult out{to_trajectory(best_res.z),
                    best_res.objective,
                    best_res.grad_norm,
                    best_res.iterations,
                    best_res.converged,
                    best,
                    std::move(best_res.history)};
    return out;
}

double reduced_objective(const FiniteHorizonProblem& prob, const Trajectory& u) {
    if (u.dim != prob.dim() || !u.discount.same_as(prob.discount()))
        throw std::invalid_argument("reduced_objective: trajectory does not fit the problem");
    const Transcription trans(prob, u.m);
    return trans.objective_nodes(u.values);
}

std::vector<double> reduced_objective_gradient(const FiniteHorizonProblem& prob,
                                               const Trajectory& u) {
    const Transcription trans(prob, u.m);
    return trans.gradient_nodes(u.values);
}

Signal lift_solution(const Trajectory& u, int K) {
    std::vector<double> period(u.values.begin(),
                               u.values.begin() + static_cast<size_t>(u.m) * u.dim);
    return periodic_extend(PeriodSignal(u.discount, u.m, u.dim, std::move(period)), K);
}

double objective_value(const Signal& x, const Lagrangian& L, const AveragingParams& params) {
    if (L.dim != x.dim) throw std::invalid_argument("objective_value: dim mismatch");
    const Grid& g = x.grid;
    const double r = g.discount.r;
    const double dt = g.dt();
    const int N = g.num_nodes();
    const Signal deriv = finite_diff_derivative(x);

    auto h_at = [&](double t, int node) {
        return std::exp(-r * t) * L.value(t, x.node(node), deriv.node(node));
    };

    double acc = 0.0;
    double prev = h_at(0.0, 0);
    for (int j = 1; j < N; ++j) {
        const double cur = h_at(g.time(j), j);
        acc += 0.5 * dt * (prev + cur);
        prev = cur;
    }

    if (x.tail == TailPolicy::ZeroExtend) return acc;  // truncated at the stored horizon

    // Continue the trapezoid chain through tiled periods until a whole
    // period stops mattering.
    const double T = g.discount.T;
    for (long k = g.K; k < g.K + params.max_terms; ++k) {
        double period_sum = 0.0;
        for (int i = 0; i < g.m; ++i) {
            const double cur = h_at(static_cast<double>(k) * T + i * dt, i);
            period_sum += 0.5 * dt * (prev + cur);
            prev = cur;
        }
        acc += period_sum;
        if (std::abs(period_sum) < params.tol * std::max(1.0, std::abs(acc))) break;
    }
    return acc;
}

double objective_value(const Signal& x, const Lagrangian& L) {
    return objective_value(x, L, AveragingParams(x.grid.discount));
}

namespace {

// Shared half-node scheme: D2 Lambda at the node minus the difference
// quotient of D3 Lambda at the flanking cell midpoints.
template <typename GradFn>
void el_residual_into(const std::vector<double>& nodes, int count, int n, double dt,
                      double t0, GradFn&& grad_at, std::vector<double>& out) {
    std::vector<double> xm(n), y(n), dx(n), dy_prev(n), dy_next(n), xc(n), yc(n);
    double ds;
    auto cell = [&](int j, std::vector<double>& xmid, std::vector<double>& slope) {
        for (int c = 0; c < n; ++c) {
            const double a = nodes[static_cast<size_t>(j) * n + c];
            const double b = nodes[static_cast<size_t>(j + 1) * n + c];
            xmid[c] = 0.5 * (a + b);
            slope[c] = (b - a) / dt;
        }
    };

    cell(0, xm, y);
    grad_at(t0 + 0.5 * dt, xm, y, ds, dx, dy_prev);
    for (int j = 1; j + 1 <= count - 1; ++j) {
        cell(j, xm, y);
        grad_at(t0 + (j + 0.5) * dt, xm, y, ds, dx, dy_next);

        for (int c = 0; c < n; ++c) {
            xc[c] = nodes[static_cast<size_t>(j) * n + c];
            yc[c] = (nodes[static_cast<size_t>(j + 1) * n + c] -
                     nodes[static_cast<size_t>(j - 1) * n + c]) /
                    (2.0 * dt);
        }
        std::vector<double> dxn(n), dyn(n);
        grad_at(t0 + j * dt, xc, yc, ds, dxn, dyn);

        for (int c = 0; c < n; ++c)
            out[static_cast<size_t>(j) * n + c] = dxn[c] - (dy_next[c] - dy_prev[c]) / dt;
        dy_prev.swap(dy_next);
    }
}

double el_residual_max(const Trajectory& u, const FiniteHorizonProblem& prob) {
    std::vector<double> out(static_cast<size_t>(u.m) * u.dim, 0.0);
    el_residual_into(u.values, u.m + 1, u.dim, u.dt(), 0.0,
                     [&](double s, StateSpan x, StateSpan y, double& ds,
                         std::span<double> dx, std::span<double> dy) {
                         prob.integrand_grad(s, x, y, ds, dx, dy);
                     },
                     out);
    double worst = 0.0;
    for (double v : out) worst = std::max(worst, std::abs(v));
    return worst;
}

}  // namespace

PeriodSignal euler_lagrange_residual(const Trajectory& u, const AveragedLagrangian& AL,
                                     bool weight_in_objective) {
    if (!AL.has_grad())
        throw std::invalid_argument("euler_lagrange_residual: gradients missing");
    if (AL.dim() != u.dim)
        throw std::invalid_argument("euler_lagrange_residual: dim mismatch");
    const double r = AL.params().discount.r;

    std::vector<double> out(static_cast<size_t>(u.m) * u.dim, 0.0);
    el_residual_into(
        u.values, u.m + 1, u.dim, u.dt(), 0.0,
        [&](double s, StateSpan x, StateSpan y, double& ds, std::span<double> dx,
            std::span<double> dy) {
            AL.grad(s, x, y, ds, dx, dy);
            if (weight_in_objective) {
                const double w = std::exp(-r * s);
                for (auto& v : dx) v *= w;
                for (auto& v : dy) v *= w;
            }
        },
        out);
    return PeriodSignal(u.discount, u.m, u.dim, std::move(out));
}

Signal euler_lagrange_residual_raw(const Signal& x, const Lagrangian& L) {
    if (!L.has_grad())
        throw std::invalid_argument("euler_lagrange_residual_raw: gradients missing");
    if (L.dim != x.dim) throw std::invalid_argument("euler_lagrange_residual_raw: dim mismatch");

    std::vector<double> out(x.values.size(), 0.0);
    el_residual_into(x.values, x.grid.num_nodes(), x.dim, x.grid.dt(), 0.0,
                     [&](double t, StateSpan xx, StateSpan yy, double& ds,
                         std::span<double> dx, std::span<double> dy) {
                         L.grad(t, xx, yy, ds, dx, dy);
                     },
                     out);
    return Signal(x.grid, x.dim, std::move(out), x.tail);
}

RegularityReport check_regularity_assumptions(const Lagrangian& L, int samples,
                                              unsigned long long seed, double box,
                                              double t_max) {
    Rng rng(seed);
    const int n = L.dim;
    RegularityReport rep;
    rep.samples = samples;
    rep.sandwich_checked = L.meta.c0 && L.meta.c1 && L.meta.alpha;
    rep.growth_checked = static_cast<bool>(L.meta.growth_M) && L.has_grad();
    rep.hessian_checked = L.has_hess();

    std::vector<double> x(n), y(n), xi(n), dx(n), dy(n), H(static_cast<size_t>(n) * n);

    auto witness = [&](const char* check, double t, const std::vector<double>& xi_used,
                       double lhs, double rhs) {
        if (rep.witnesses.size() < 8) rep.witnesses.push_back({check, t, x, y, xi_used, lhs, rhs});
    };

    for (int sidx = 0; sidx < samples; ++sidx) {
        const double t = rng.uniform(0.0, t_max);
        for (int c = 0; c < n; ++c) x[c] = rng.uniform(-box, box);
        for (int c = 0; c < n; ++c) y[c] = rng.uniform(-box, box);

        if (rep.sandwich_checked) {
            const double v = L.value(t, x, y);
            const double ya = std::pow(std::sqrt(sq_norm(y)), *L.meta.alpha);
            const double lo = *L.meta.c0 * ya;
            const double hi = *L.meta.c1 * (1.0 + ya);
            const double slack = 1e-9 * (1.0 + std::abs(v));
            if (v < lo - slack) {
                ++rep.sandwich_failures;
                witness("sandwich-lower", t, {}, v, lo);
            }
            if (v > hi + slack) {
                ++rep.sandwich_failures;
                witness("sandwich-upper", t, {}, v, hi);
            }
        }

        if (rep.growth_checked) {
            double ds;
            L.grad(t, x, y, ds, dx, dy);
            const double lhs = std::sqrt(sq_norm(dx)) + std::sqrt(sq_norm(dy));
            const double R = std::sqrt(sq_norm(x) + sq_norm(y));
            const double rhs = L.meta.growth_M(R) * (1.0 + sq_norm(y));
            if (lhs > rhs + 1e-9 * (1.0 + lhs)) {
                ++rep.growth_failures;
                witness("gradient-growth", t, {}, lhs, rhs);
            }
        }

        if (rep.hessian_checked) {
            L.hess_yy(t, x, y, H);
            double hmax = 0.0;
            for (double hv : H) hmax = std::max(hmax, std::abs(hv));
            auto qform = [&](const std::vector<double>& v) {
                double s = 0.0;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) s += v[i] * H[static_cast<size_t>(i) * n + j] * v[j];
                return s;
            };
            // one random direction plus the y-aligned one
            double norm = 0.0;
            for (int c = 0; c < n; ++c) {
                xi[c] = rng.normal();
                norm += xi[c] * xi[c];
            }
            norm = std::sqrt(norm);
            for (int c = 0; c < n; ++c) xi[c] /= (norm > 0.0 ? norm : 1.0);
            if (qform(xi) <= 1e-12 * (1.0 + hmax)) {
                ++rep.hessian_failures;
                witness("hessian-positivity", t, xi, qform(xi), 0.0);
            } else {
                const double yn = std::sqrt(sq_norm(y));
                if (yn > 1e-12) {
                    std::vector<double> yhat(n);
                    for (int c = 0; c < n; ++c) yhat[c] = y[c] / yn;
                    if (qform(yhat) <= 1e-12 * (1.0 + hmax)) {
                        ++rep.hessian_failures;
                        witness("hessian-positivity", t, yhat, qform(yhat), 0.0);
                    }
                }
            }
        }
    }
    return rep;
}

}  // namespace perhor
