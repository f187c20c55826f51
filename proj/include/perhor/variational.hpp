#pragma once

#include <string>
#include <vector>

#include "perhor/averaged_lagrangian.hpp"
#include "perhor/signal.hpp"

namespace perhor {

/// Finite-horizon problem on [0, T] produced by the reduction: minimize
/// prefactor * integral of Lambda(s, u, u') with u(0) = u(T) = eta, where
/// Lambda = e^{-rs} * averaged integrand and prefactor = 1/(1-q) in the
/// weighted (default) form. The unweighted literal variant drops both
/// the e^{-rs} factor and the prefactor.
struct FiniteHorizonProblem {
    AveragedLagrangian averaged;
    std::vector<double> eta;
    bool weight_in_objective = true;

    const DiscountConfig& discount() const { return averaged.params().discount; }
    int dim() const { return averaged.dim(); }
    double prefactor() const;

    /// Lambda(s, x, y).
    double integrand(double s, StateSpan x, StateSpan y) const;

    /// Partials of Lambda; analytic when the base Lagrangian has a
    /// gradient, central finite differences (step 1e-6 * scale) otherwise.
    void integrand_grad(double s, StateSpan x, StateSpan y, double& d_s,
                        std::span<double> d_x, std::span<double> d_y) const;
};

FiniteHorizonProblem reduce_problem(Lagrangian L, const DiscountConfig& discount,
                                    std::vector<double> eta, const AveragingParams& params,
                                    bool weight_in_objective = true);

/// Piecewise-linear trajectory on [0, T]: nodes u_0..u_m with
/// u_0 = u_m = eta held exactly, derivative constant per cell.
struct Trajectory {
    DiscountConfig discount;
    int m = 2;
    int dim = 1;
    std::vector<double> eta;
    std::vector<double> values;  // (m+1) * dim

    Trajectory(DiscountConfig d, int m_, std::vector<double> eta_);

    double dt() const { return discount.T / m; }
    double time(int j) const { return j * dt(); }
    double at(int j, int c = 0) const { return values[static_cast<size_t>(j) * dim + c]; }
    double& at(int j, int c = 0) { return values[static_cast<size_t>(j) * dim + c]; }
};

struct SolveOptions {
    int max_iters = 1000;
    double grad_tol = 1e-9;
    int multistart = 1;
    unsigned long long seed = 2024;
    bool quasi_newton = true;   ///< L-BFGS acceleration; plain descent otherwise
    int memory = 8;             ///< L-BFGS history
    double armijo = 1e-4;
    double backtrack = 0.5;
    int max_line_steps = 50;
    double start_spread = 0.0;  ///< bump size for multistarts, 0 = auto
};

struct SolveResult {
    Trajectory trajectory;
    double objective = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    int chosen_start = 0;
    std::vector<double> objective_history;  ///< accepted iterates, nonincreasing
};

/// Direct transcription: cell-midpoint quadrature of the problem
/// integrand over m cells, minimized over the interior nodes by
/// backtracking descent (L-BFGS by default), optionally from several
/// perturbed starts. Ties between starts (within 1e-12) break toward
/// the smaller Euler-Lagrange residual.
SolveResult solve_finite_horizon(const FiniteHorizonProblem& prob, int m,
                                 const SolveOptions& opts = {});

/// The transcription objective at a given trajectory (prefactor included).
double reduced_objective(const FiniteHorizonProblem& prob, const Trajectory& u);
/// Its gradient with respect to the interior nodes, same layout as values.
std::vector<double> reduced_objective_gradient(const FiniteHorizonProblem& prob,
                                               const Trajectory& u);

/// Periodic lift of the trajectory over K periods (node m dropped).
Signal lift_solution(const Trajectory& u, int K);

/// Discounted infinite-horizon cost of a stored signal: trapezoid of
/// e^{-rt} L(t, x, x') over the stored nodes; ExactPeriodic signals get
/// the tail periods summed term by term (truncated at params.tol).
double objective_value(const Signal& x, const Lagrangian& L, const AveragingParams& params);
double objective_value(const Signal& x, const Lagrangian& L);

/// Discrete Euler-Lagrange defect of the effective integrand at interior
/// nodes: D2 Lambda(s_j, u_j, u'_j) - [D3 Lambda at the flanking cell
/// midpoints] / dt. Node 0 of the returned period holds zeros.
PeriodSignal euler_lagrange_residual(const Trajectory& u, const AveragedLagrangian& AL,
                                     bool weight_in_objective = true);

/// Same defect for the raw (un-averaged) integrand along a stored
/// signal; reported for inspection, not asserted to vanish. Boundary
/// nodes hold zeros.
Signal euler_lagrange_residual_raw(const Signal& x, const Lagrangian& L);

struct RegularityWitness {
    std::string check;
    double t = 0.0;
    std::vector<double> x, y, xi;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct RegularityReport {
    int samples = 0;
    bool sandwich_checked = false;
    bool growth_checked = false;
    bool hessian_checked = false;
    int sandwich_failures = 0;
    int growth_failures = 0;
    int hessian_failures = 0;
    std::vector<RegularityWitness> witnesses;  // capped
    bool ok() const { return sandwich_failures + growth_failures + hessian_failures == 0; }
};

/// Monte-Carlo spot checks of the regularity assumptions the
/// Euler-Lagrange theory needs: the c0/c1 sandwich, the M(R) gradient
/// growth bound, and strict positivity of D33 L along random and
/// y-aligned directions. Only the checks whose data is present run.
RegularityReport check_regularity_assumptions(const Lagrangian& L, int samples,
                                              unsigned long long seed = 7, double box = 3.0,
                                              double t_max = 20.0);

}  // namespace perhor
