#pragma once

#include "posdelay/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace posdelay {

/// Best decay-rate bound over all certificates v of a positive linear system.
struct OptimalRate {
    bool continuous = true;
    /// eta* (continuous) or gamma* (discrete).
    double rate = 0.0;
    /// Optimizing weight vector, unit 2-norm.
    PositiveVector v_star;
    int iterations = 0;
    /// spectral_abscissa(A + e^{eta* tau} B) + eta*, or perron_root(A + gamma*^{-d} B) - gamma*.
    double residual = 0.0;
    /// gamma* hit the lower end of the search interval (A, B essentially zero).
    bool degenerate = false;
    std::vector<std::string> warnings;
};

/**
 * eta* = sup of min_i eta_i(v) over v > 0 with (A + B) v < 0.
 *
 * For a fixed rate eta, the constraint set {v > 0 : A v + e^{eta tau} B v +
 * eta v <= 0} is nonempty iff the Metzler matrix A + e^{eta tau} B + eta I has
 * nonpositive spectral abscissa, so eta* is the root of the strictly
 * increasing function phi(eta) = spectral_abscissa(A + e^{eta tau} B) + eta.
 * The root is bracketed by doubling and refined by bisection, deciding the
 * sign of phi with hurwitz_certificate. At the root the Perron vector makes
 * every component rate equal to eta*.
 *
 * std::nullopt when A + B is not Hurwitz.
 */
std::optional<OptimalRate> optimize_eta(const MetzlerMatrix& a, const NonnegativeMatrix& b, double tau_max,
                                        double tol = kDefaultTol);

/**
 * gamma* = inf of max_i gamma_i(v) over v > 0 with (A + B) v < v: the fixed
 * point in (0, 1) of psi(gamma) = perron_root(A + gamma^{-d} B), found by
 * bisection on [1e-6, 1]. std::nullopt when rho(A + B) >= 1.
 */
std::optional<OptimalRate> optimize_gamma(const NonnegativeMatrix& a, const NonnegativeMatrix& b, long long d_max,
                                          double tol = kDefaultTol);

/// optimize_eta on the majorant pair (A^M, |B|).
std::optional<OptimalRate> optimize_general_continuous(const Matrix& a, const Matrix& b, double tau_max,
                                                       double tol = kDefaultTol);

/// optimize_gamma on (|A|, |B|).
std::optional<OptimalRate> optimize_general_discrete(const Matrix& a, const Matrix& b, long long d_max,
                                                     double tol = kDefaultTol);

} // namespace posdelay
