#pragma once

#include "perhor/lagrangian.hpp"

namespace perhor {

/// Knobs of the built-in integrands.
struct CatalogParams {
    double amp_cos = 1.0;  ///< tracking target: cosine amplitude
    double amp_sin = 0.0;  ///< tracking target: sine amplitude
    double offset = 0.0;   ///< tracking target: constant offset
    double kappa = 1.0;    ///< modulated: exponential decay rate in t
};

/// L = |y|^2. Autonomous Dirichlet energy.
Lagrangian make_dirichlet(int dim);

/// L = |y|^2 + |x|^2. Autonomous; its transcription is a linear system.
Lagrangian make_quadratic(int dim);

/// L = |y|^2 + |x - phi(t) 1|^2 with phi(t) = offset + amp_cos cos(2 pi t / T)
/// + amp_sin sin(2 pi t / T); T-periodic in t.
Lagrangian make_tracking(int dim, double T, const CatalogParams& p = {});

/// L = |y|^2 + e^{-kappa t} (1 + |x|^2); genuinely t-dependent and not
/// periodic, so the averaging series actually works here.
Lagrangian make_modulated(int dim, const CatalogParams& p = {});

/// Lookup by name: "dirichlet", "quadratic", "tracking", "modulated".
/// Throws std::invalid_argument for unknown names.
Lagrangian make_catalog_lagrangian(const std::string& name, int dim, double T,
                                   const CatalogParams& p = {});

}  // namespace perhor
