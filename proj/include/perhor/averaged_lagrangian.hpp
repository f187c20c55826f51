#pragma once

#include "perhor/averaging.hpp"
#include "perhor/lagrangian.hpp"

namespace perhor {

/// Bookkeeping of one series evaluation.
struct SeriesStats {
    long terms = 0;            ///< terms actually summed
    double weight_defect = 0;  ///< geometric weight mass left unsummed, q^terms
    bool converged = true;     ///< tail bound met the tolerance
};

/// The averaged integrand: value(s, x, y) = (1-q) sum_k q^k L(s + kT, x, y)
/// for s in [0, T]. Terms are summed until the tail bound
/// q^{k+1} * sup|L| drops below tol (sup|L| is the running max of the
/// seen terms, tightened by c1 (1 + |y|^alpha) when the metadata carries
/// it) or max_terms is hit. Hitting the cap while terms are still not
/// decreasing is reported as non-convergence. Lagrangians flagged
/// periodic_in_t short-circuit to a single exact term.
///
/// Evaluation is pure; instances can be shared across threads.
class AveragedLagrangian {
  public:
    AveragedLagrangian(Lagrangian base, AveragingParams params);

    double value(double s, StateSpan x, StateSpan y) const;
    double value(double s, StateSpan x, StateSpan y, SeriesStats& stats) const;

    bool has_grad() const { return base_.has_grad(); }

    /// Partials of the averaged integrand, obtained by averaging the
    /// base partials term by term with the same truncation rule.
    void grad(double s, StateSpan x, StateSpan y, double& d_s, std::span<double> d_x,
              std::span<double> d_y) const;
    void grad(double s, StateSpan x, StateSpan y, double& d_s, std::span<double> d_x,
              std::span<double> d_y, SeriesStats& stats) const;

    const Lagrangian& base() const { return base_; }
    const AveragingParams& params() const { return params_; }
    int dim() const { return base_.dim; }

  private:
    Lagrangian base_;
    AveragingParams params_;
};

AveragedLagrangian averaged_lagrangian(Lagrangian L, const AveragingParams& params);

/// Standalone gradient evaluator (requires the base gradient).
std::function<void(double s, StateSpan x, StateSpan y, double& d_s, std::span<double> d_x,
                   std::span<double> d_y)>
averaged_lagrangian_grad(const AveragedLagrangian& AL);

/// One failed sample of a structural spot check.
struct StructuralWitness {
    std::string check;
    double s = 0.0;
    std::vector<double> x, y, y_alt;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct StructuralReport {
    int samples = 0;
    int failures = 0;
    std::vector<StructuralWitness> witnesses;  // capped
    bool ok() const { return failures == 0; }
};

/// Monte-Carlo verification at random (s, x, y):
///   - convexity of value(s, x, .) along random segments (midpoint rule),
///   - value >= rho(y) when the metadata carries rho,
///   - c0 |y|^alpha <= value <= c1 (1 + |y|^alpha) when the constants are set.
StructuralReport structural_checks(const AveragedLagrangian& AL, int samples,
                                   unsigned long long seed = 99, double box = 3.0);

}  // namespace perhor
