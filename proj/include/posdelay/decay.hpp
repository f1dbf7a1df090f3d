#pragma once

#include "posdelay/linalg.hpp"
#include "posdelay/vecfield.hpp"

#include <string>
#include <vector>

namespace posdelay {

/// Per-component decay rates for one certificate v and one delay bound.
struct RateResult {
    bool continuous = true;
    /// eta_i (1/time) or gamma_i (per step). Excluded components hold 0 (discrete).
    Vector per_component;
    /// |residual| of the defining scalar equation at each returned root.
    Vector residuals;
    /// Components left out of the aggregate (discrete f_i(v) = g_i(v) = 0).
    std::vector<bool> excluded;
    /// min_i eta_i, or max_i gamma_i over the included components.
    double aggregate = 0.0;
    double delay_bound = 0.0;
    std::vector<std::string> warnings;
};

/// Root of a + b e^{eta tau} + eta = 0 on [0, -(a + b)], with a + b < 0 and b >= 0.
struct ScalarRoot {
    double root;
    double residual;
};

/// Returns the lower end of the final bracket, so the rate is never overstated.
ScalarRoot solve_continuous_rate(double a, double b, double tau_max, double tol = kDefaultTol);

/// Root in (0, 1) of a + b gamma^{-d} = gamma, with a + b < 1 and b > 0.
/// Returns the upper end of the final bracket, so the rate is never overstated.
ScalarRoot solve_discrete_rate(double a, double b, long long d_max, double tol = kDefaultTol);

/// Requires verify_continuous(f, g, v) to accept; throws PreconditionError otherwise.
RateResult eta_components(const HomogeneousField& f, const HomogeneousField& g, const PositiveVector& v,
                          double tau_max, double tol = kDefaultTol);

/// Rates for arbitrary real A, B via the majorant pair (A^M, |B|).
RateResult eta_components_general(const Matrix& a, const Matrix& b, const PositiveVector& v, double tau_max,
                                  double tol = kDefaultTol);

/// Requires verify_discrete(f, g, v) to accept.
RateResult gamma_components(const HomogeneousField& f, const HomogeneousField& g, const PositiveVector& v,
                            long long d_max, double tol = kDefaultTol);

/// Rates for arbitrary real A, B via (|A|, |B|).
RateResult gamma_components_general(const Matrix& a, const Matrix& b, const PositiveVector& v, long long d_max,
                                    double tol = kDefaultTol);

} // namespace posdelay
