#pragma once

#include <span>
#include <vector>

#include "perhor/averaging.hpp"
#include "perhor/signal.hpp"

namespace perhor {

/// L2(mu_r) projection of x onto the stored-periodic subspace: the
/// per-period content and its tiled lift.
struct PeriodicProjection {
    PeriodSignal period;
    Signal lifted;
};

/// period = A x, lifted = tile(A x). Among periodic candidates g, the
/// lift minimizes the discounted distance to x continued by its declared
/// tail policy.
PeriodicProjection project_periodic(const Signal& x);

/// max over residues i of | sum_k q^k x[i + k m] | (Euclidean norm over
/// components, tail per the signal's policy). Zero exactly when x is
/// orthogonal to every stored-periodic signal in the discounted inner
/// product.
double orthogonality_residual(const Signal& x);

/// Seasonality + trend split of Thm-type least squares:
/// minimize E(p, a) = "integral of e^{-rt} |x(t) - p(t) - t a|^2" in its
/// discretized form, over one-period samples p and slope a.
struct Decomposition {
    PeriodSignal p_hat;
    std::vector<double> a_hat;
    double residual_energy = 0.0;
};

/// Closed-form solution via the averaging operators; exact minimizer of
/// the same discrete objective decompose_oracle assembles. ZeroExtend
/// needs K >= 2 (a single stored period cannot identify a trend).
Decomposition decompose(const Signal& x);

/// Brute-force reference: assembles the (m n + n)-unknown normal
/// equations of the discretized objective directly, node by node (tail
/// periods of an ExactPeriodic signal are accumulated term by term, no
/// series identities), and solves them densely. Capped at
/// m n + n <= 10^4 unknowns.
Decomposition decompose_oracle(const Signal& x);

/// The discretized objective E(p, a) both solvers minimize: weighted sum
/// of |x_j - p_{j mod m} - t_j a|^2 over the stored horizon with the
/// period-profile weights w_i q^k, plus the geometric tail when x is
/// declared ExactPeriodic (tiled data, p and t a continued).
double decomposition_energy(const Signal& x, const PeriodSignal& p, std::span<const double> a);

}  // namespace perhor
