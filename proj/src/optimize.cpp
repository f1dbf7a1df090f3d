#include "posdelay/optimize.hpp"

#include "posdelay/certify.hpp"
#include "posdelay/error.hpp"

#include <cmath>
#include <limits>

namespace posdelay {

namespace {

constexpr double kGammaFloor = 1e-6;
constexpr double kFallbackShrink = 1e-6;
constexpr int kMaxDoublings = 64;

// A + c B + s I, or nullopt when c B overflows.
std::optional<MetzlerMatrix> combine(const Matrix& a, const Matrix& b, double c, double s) {
    Matrix m = a;
    if (!b.isZero(0.0)) {
        if (!std::isfinite(c)) return std::nullopt;
        m += c * b;
        if (!m.allFinite()) return std::nullopt;
    }
    m.diagonal().array() += s;
    return MetzlerMatrix(std::move(m));
}

double bisection_floor(double tol, double scale) {
    return std::max(1e-3 * tol, 4.0 * std::numeric_limits<double>::epsilon() * std::max(scale, 1.0));
}

PositiveVector weight_vector(const Matrix& at_optimum, const std::optional<MetzlerMatrix>& fallback_system,
                             double tol, std::vector<std::string>& warnings) {
    try {
        return perron_vector(MetzlerMatrix(at_optimum), tol);
    } catch (const ReducibleMatrixError&) {
        warnings.push_back("matrix at the optimum is reducible; v* is the all-ones-solve certificate at a "
                           "rate shrunk by 1e-6");
    } catch (const ConvergenceError&) {
        warnings.push_back("Perron vector did not converge; v* is the all-ones-solve certificate at a "
                           "rate shrunk by 1e-6");
    } catch (const ValidationError&) {
        warnings.push_back("Perron vector has vanishing entries; v* is the all-ones-solve certificate at a "
                           "rate shrunk by 1e-6");
    }
    if (fallback_system) {
        if (auto v = hurwitz_certificate(*fallback_system)) return v->normalized();
    }
    throw ConvergenceError("no positive weight vector found at the optimum");
}

} // namespace

std::optional<OptimalRate> optimize_eta(const MetzlerMatrix& a, const NonnegativeMatrix& b, double tau_max,
                                        double tol) {
    if (a.size() != b.size()) throw DimensionError("optimize_eta: A and B differ in size");
    if (tau_max < 0.0) throw PreconditionError("optimize_eta: tau_max must be nonnegative");
    if (!(tol > 0.0)) throw PreconditionError("optimize_eta: tol must be positive");
    const Matrix& am = a.entries();
    const Matrix& bm = b.entries();

    if (!hurwitz_certificate(MetzlerMatrix(am + bm))) return std::nullopt;

    int iterations = 0;
    // phi(eta) < 0
    auto below_root = [&](double eta) {
        ++iterations;
        const auto m = combine(am, bm, std::exp(eta * tau_max), eta);
        return m && hurwitz_certificate(*m).has_value();
    };

    double lo = 0.0;
    double hi = 1.0;
    for (int k = 0; below_root(hi); ++k) {
        if (k == kMaxDoublings) throw ConvergenceError("optimize_eta: could not bracket the optimum");
        lo = hi;
        hi *= 2.0;
    }
    const double floor = bisection_floor(tol, hi);
    while (hi - lo > floor) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (below_root(mid) ? lo : hi) = mid;
    }
    const double eta = lo;

    std::vector<std::string> warnings;
    const Matrix at_optimum = am + std::exp(eta * tau_max) * bm;
    const double shrunk = eta * (1.0 - kFallbackShrink);
    PositiveVector v = weight_vector(at_optimum, combine(am, bm, std::exp(shrunk * tau_max), shrunk), tol, warnings);

    const double residual = spectral_abscissa(MetzlerMatrix(at_optimum), 0.1 * tol) + eta;
    return OptimalRate{true, eta, std::move(v), iterations, residual, false, std::move(warnings)};
}

std::optional<OptimalRate> optimize_gamma(const NonnegativeMatrix& a, const NonnegativeMatrix& b, long long d_max,
                                          double tol) {
    if (a.size() != b.size()) throw DimensionError("optimize_gamma: A and B differ in size");
    if (d_max < 0) throw PreconditionError("optimize_gamma: d_max must be nonnegative");
    if (!(tol > 0.0)) throw PreconditionError("optimize_gamma: tol must be positive");
    const Matrix& am = a.entries();
    const Matrix& bm = b.entries();
    const double d = static_cast<double>(d_max);

    if (!hurwitz_certificate(MetzlerMatrix(am + bm).shifted(-1.0))) return std::nullopt;

    int iterations = 0;
    // psi(gamma) < gamma
    auto above_root = [&](double gamma) {
        ++iterations;
        const auto m = combine(am, bm, std::pow(gamma, -d), -gamma);
        return m && hurwitz_certificate(*m).has_value();
    };

    std::vector<std::string> warnings;
    bool degenerate = false;
    double gamma = 1.0;
    if (above_root(kGammaFloor)) {
        degenerate = true;
        gamma = kGammaFloor;
        warnings.push_back("rho(A + gamma^-d B) < gamma already at gamma = 1e-6; reporting the floor");
    } else {
        double lo = kGammaFloor;
        double hi = 1.0;
        const double floor = bisection_floor(tol, 1.0);
        while (hi - lo > floor) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            (above_root(mid) ? hi : lo) = mid;
        }
        gamma = hi;
    }

    const Matrix at_optimum = am + std::pow(gamma, -d) * bm;
    const double loosened = gamma + kFallbackShrink * (1.0 - gamma);
    PositiveVector v =
        weight_vector(at_optimum, combine(am, bm, std::pow(loosened, -d), -loosened), tol, warnings);

    const double residual = perron_root(NonnegativeMatrix(at_optimum), 0.1 * tol) - gamma;
    return OptimalRate{false, gamma, std::move(v), iterations, residual, degenerate, std::move(warnings)};
}

std::optional<OptimalRate> optimize_general_continuous(const Matrix& a, const Matrix& b, double tau_max,
                                                       double tol) {
    const auto [am, bm] = majorant_continuous(a, b);
    return optimize_eta(am, bm, tau_max, tol);
}

std::optional<OptimalRate> optimize_general_discrete(const Matrix& a, const Matrix& b, long long d_max,
                                                     double tol) {
    const auto [am, bm] = majorant_discrete(a, b);
    return optimize_gamma(am, bm, d_max, tol);
}

} // namespace posdelay
