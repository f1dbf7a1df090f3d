#pragma once

#include "posdelay/linalg.hpp"
#include "posdelay/system.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace posdelay {

/// Bounded time-varying delay tau(t) (continuous) or d(k) (discrete).
class DelaySignal {
public:
    struct Constant {
        double value;
    };
    /// offset + amplitude * sin(omega t + phase)
    struct Sinusoid {
        double offset;
        double amplitude;
        double omega;
        double phase;
    };
    /// Piecewise-linear through (t, tau) points, held constant outside them.
    struct Table {
        std::vector<std::pair<double, double>> points;
    };
    /// Integer delays d(0), d(1), ... repeated cyclically. Discrete only.
    struct Sequence {
        std::vector<long long> values;
    };

    static DelaySignal constant(double value, double bound);
    static DelaySignal sinusoid(double offset, double amplitude, double omega, double phase, double bound);
    static DelaySignal table(std::vector<std::pair<double, double>> points, double bound);
    static DelaySignal sequence(std::vector<long long> values, long long bound);

    double declared_bound() const noexcept { return bound_; }
    bool is_sequence() const noexcept { return std::holds_alternative<Sequence>(kind_); }

    /// tau(t); throws DelayBoundError outside [0, declared bound]. Not defined for sequences.
    double at(double t) const;

    /// d(k); throws DelayBoundError outside [0, declared bound] or when the value is not an integer.
    long long at_step(long long k) const;

    std::string describe() const;

private:
    using Kind = std::variant<Constant, Sinusoid, Table, Sequence>;
    DelaySignal(Kind kind, double bound);
    double raw(double t) const;

    Kind kind_;
    double bound_;
};

/// Initial function phi on [-tau_max, 0] (or the sequence on {-d_max, ..., 0}).
class InitialHistory {
public:
    static InitialHistory constant(Vector value);
    /// One expression per component in the variable t.
    static InitialHistory expression(const std::vector<std::string>& components);
    /// Piecewise-linear through (t, value) points sorted by t, held constant outside them.
    static InitialHistory table(std::vector<std::pair<double, Vector>> points);

    Index dimension() const noexcept { return dimension_; }
    Vector at(double s) const;

    /// sup of ||phi(s)||_inf^v sampled on [lower, 0] every `step` (endpoints included).
    double weighted_norm(const PositiveVector& v, double lower, double step) const;

    bool is_constant() const noexcept;

private:
    struct ConstantKind {
        Vector value;
    };
    struct ExpressionKind {
        std::vector<ExprPtr> components;
    };
    struct TableKind {
        std::vector<std::pair<double, Vector>> points;
    };
    using Kind = std::variant<ConstantKind, ExpressionKind, TableKind>;
    InitialHistory(Kind kind, Index n) : kind_(std::move(kind)), dimension_(n) {}

    Kind kind_;
    Index dimension_;
};

struct Trajectory {
    bool discrete = false;
    std::vector<double> times;
    std::vector<Vector> states;
    /// Weighted inf-norm of each state (unit weights unless a weight was supplied).
    std::vector<double> norm_track;
    Vector weight;
    double step = 0.0;
    std::string delay_description;
    std::uint64_t system_hash = 0;
    /// Set when the run stopped early (divergence).
    std::optional<std::string> diagnostic;

    std::size_t size() const noexcept { return times.size(); }
};

/// Stable 64-bit hash of a system description.
std::uint64_t system_hash(const SystemSpec& sys);

/**
 * Fixed-step classical Runge-Kutta. Delayed states come from the stored grid
 * by cubic Hermite interpolation, from the history for arguments <= 0, and
 * from the current stage for delays shorter than one step. The step is
 * shrunk so the grid ends exactly at t_end.
 */
Trajectory simulate_continuous(const SystemSpec& sys, const DelaySignal& delay, const InitialHistory& history,
                               double t_end, double step, const std::optional<PositiveVector>& weight = std::nullopt);

/// Exact recursion x(k+1) = f(x(k)) + g(x(k - d(k))) for k = 0 .. k_end - 1.
Trajectory simulate_discrete(const SystemSpec& sys, const DelaySignal& delay, const InitialHistory& history,
                             long long k_end, const std::optional<PositiveVector>& weight = std::nullopt);

/// Default step: min(1e-2, tau_max / 100), or 1e-2 without delay.
double default_step(double tau_max);

/// Relative slack allowed over the envelope: 1e-3 continuous, 1e-9 discrete.
double default_envelope_tolerance(bool discrete);

/// Continuous rates are shrunk by this factor before use, since only rates
/// strictly below the supremum are certified.
inline constexpr double kEnvelopeRateShrink = 1e-6;

struct EnvelopeReport {
    bool pass = true;
    double max_ratio = 0.0;
    double effective_rate = 0.0;
    std::optional<std::size_t> first_violation;
    std::optional<double> violation_time;
    /// phi_norm * e^{-rate t} or phi_norm * rate^k at each sample.
    std::vector<double> envelope;
};

/// max over samples of ||x||_inf^v / (phi_norm * envelope); passes iff <= 1 + tol_env.
EnvelopeReport check_envelope(const Trajectory& traj, const PositiveVector& v, double rate, double phi_norm,
                              std::optional<double> tol_env = std::nullopt);

struct PositivityReport {
    bool pass = true;
    double min_entry = 0.0;
    double max_norm = 0.0;
    std::optional<std::size_t> first_violation;
};

/// min_{i,t} x_i(t) >= -1e-9 max_t ||x(t)||_inf.
PositivityReport positivity_monitor(const Trajectory& traj);

/// Header t,x1,...,xn,norm_v[,envelope]; one row per sample.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const EnvelopeReport* envelope = nullptr);

} // namespace posdelay
