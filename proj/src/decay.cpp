#include "posdelay/decay.hpp"

#include "posdelay/certify.hpp"
#include "posdelay/error.hpp"

#include <algorithm>
#include <cmath>

namespace posdelay {

namespace {

constexpr int kMaxBisections = 2000;
constexpr double kGammaFloor = 1e-12;

struct Ratios {
    Vector a; // f_i(v) / v_i
    Vector b; // g_i(v) / v_i, zeroed when |g_i(v)| <= kStrictTol ||v||_inf
};

Ratios ratios(const Vector& fv, const Vector& gv, const PositiveVector& v) {
    const double zero = kStrictTol * v.values().maxCoeff();
    Ratios r{fv.cwiseQuotient(v.values()), gv.cwiseQuotient(v.values())};
    for (Index i = 0; i < gv.size(); ++i)
        if (std::abs(gv[i]) <= zero) r.b[i] = 0.0;
    return r;
}

void require_tol(double tol) {
    if (!(tol > 0.0)) throw PreconditionError("rate solver: tol must be positive");
}

RateResult continuous_rates(const Ratios& r, double tau_max, double tol) {
    RateResult out;
    out.continuous = true;
    out.delay_bound = tau_max;
    const Index n = r.a.size();
    out.per_component.resize(n);
    out.residuals.resize(n);
    out.excluded.assign(static_cast<std::size_t>(n), false);
    for (Index i = 0; i < n; ++i) {
        const ScalarRoot root = solve_continuous_rate(r.a[i], r.b[i], tau_max, tol);
        out.per_component[i] = root.root;
        out.residuals[i] = root.residual;
    }
    out.aggregate = out.per_component.minCoeff();
    return out;
}

RateResult discrete_rates(const Ratios& r, long long d_max, double tol) {
    RateResult out;
    out.continuous = false;
    out.delay_bound = static_cast<double>(d_max);
    const Index n = r.a.size();
    out.per_component.resize(n);
    out.residuals.resize(n);
    out.excluded.assign(static_cast<std::size_t>(n), false);
    out.aggregate = 0.0;
    bool any = false;
    for (Index i = 0; i < n; ++i) {
        if (r.b[i] == 0.0 && r.a[i] <= kStrictTol) {
            out.per_component[i] = 0.0;
            out.residuals[i] = 0.0;
            out.excluded[static_cast<std::size_t>(i)] = true;
            out.warnings.push_back("component " + std::to_string(i + 1) +
                                   " has f_i(v) = g_i(v) = 0; excluded from the aggregate rate");
            continue;
        }
        const ScalarRoot root = solve_discrete_rate(r.a[i], r.b[i], d_max, tol);
        out.per_component[i] = root.root;
        out.residuals[i] = root.residual;
        out.aggregate = any ? std::max(out.aggregate, root.root) : root.root;
        any = true;
    }
    return out;
}

} // namespace

ScalarRoot solve_continuous_rate(double a, double b, double tau_max, double tol) {
    require_tol(tol);
    if (tau_max < 0.0) throw PreconditionError("tau_max must be nonnegative");
    if (!(a + b < 0.0)) throw PreconditionError("rate equation needs a + b < 0");
    if (b < 0.0) throw PreconditionError("rate equation needs a nonnegative delayed term");
    if (b == 0.0 || tau_max == 0.0) return {-(a + b), 0.0};

    auto h = [&](double eta) { return a + b * std::exp(eta * tau_max) + eta; };
    double lo = 0.0;
    double hi = -(a + b);
    double h_lo = h(lo);
    if (!(h_lo < 0.0 && h(hi) >= 0.0)) {
        throw ConvergenceError("rate equation bracket does not straddle the root");
    }
    for (int it = 0; it < kMaxBisections; ++it) {
        if (hi - lo <= tol && std::abs(h_lo) <= tol) break;
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double h_mid = h(mid);
        if (h_mid < 0.0) {
            lo = mid;
            h_lo = h_mid;
        } else {
            hi = mid;
        }
    }
    return {lo, std::abs(h_lo)};
}

ScalarRoot solve_discrete_rate(double a, double b, long long d_max, double tol) {
    require_tol(tol);
    if (d_max < 0) throw PreconditionError("d_max must be nonnegative");
    if (!(a + b < 1.0)) throw PreconditionError("rate equation needs a + b < 1");
    if (b < 0.0) throw PreconditionError("rate equation needs a nonnegative delayed term");
    if (b == 0.0) return {std::clamp(a, 0.0, 1.0), 0.0};
    if (d_max == 0) return {a + b, 0.0};

    const double d = static_cast<double>(d_max);
    auto h = [&](double gamma) { return a + b * std::pow(gamma, -d) - gamma; };
    double lo = std::max(a, kGammaFloor);
    double hi = 1.0;
    double h_hi = h(hi);
    if (!(h(lo) > 0.0 && h_hi < 0.0)) {
        throw ConvergenceError("rate equation bracket does not straddle the root");
    }
    for (int it = 0; it < kMaxBisections; ++it) {
        if (hi - lo <= tol && std::abs(h_hi) <= tol) break;
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double h_mid = h(mid);
        if (h_mid > 0.0) {
            lo = mid;
        } else {
            hi = mid;
            h_hi = h_mid;
        }
    }
    return {hi, std::abs(h_hi)};
}

RateResult eta_components(const HomogeneousField& f, const HomogeneousField& g, const PositiveVector& v,
                          double tau_max, double tol) {
    if (tau_max < 0.0) throw PreconditionError("tau_max must be nonnegative");
    const VerifyResult check = verify_continuous(f, g, v);
    if (!check) throw PreconditionError("v does not satisfy f(v) + g(v) < 0");
    return continuous_rates(ratios(f.evaluate(v.values()), g.evaluate(v.values()), v), tau_max, tol);
}

RateResult eta_components_general(const Matrix& a, const Matrix& b, const PositiveVector& v, double tau_max,
                                  double tol) {
    if (tau_max < 0.0) throw PreconditionError("tau_max must be nonnegative");
    if (!verify_general_continuous(a, b, v)) {
        throw PreconditionError("v does not satisfy (A^M + |B|) v < 0");
    }
    const auto [am, bm] = majorant_continuous(a, b);
    return continuous_rates(ratios(am.entries() * v.values(), bm.entries() * v.values(), v), tau_max, tol);
}

RateResult gamma_components(const HomogeneousField& f, const HomogeneousField& g, const PositiveVector& v,
                            long long d_max, double tol) {
    if (d_max < 0) throw PreconditionError("d_max must be nonnegative");
    if (!verify_discrete(f, g, v)) throw PreconditionError("v does not satisfy f(v) + g(v) < v");
    return discrete_rates(ratios(f.evaluate(v.values()), g.evaluate(v.values()), v), d_max, tol);
}

RateResult gamma_components_general(const Matrix& a, const Matrix& b, const PositiveVector& v, long long d_max,
                                    double tol) {
    if (d_max < 0) throw PreconditionError("d_max must be nonnegative");
    if (!verify_general_discrete(a, b, v)) throw PreconditionError("v does not satisfy (|A| + |B|) v < v");
    const auto [am, bm] = majorant_discrete(a, b);
    return discrete_rates(ratios(am.entries() * v.values(), bm.entries() * v.values(), v), d_max, tol);
}

} // namespace posdelay
