#include "posdelay/simulate.hpp"

#include "posdelay/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace posdelay {

namespace {

constexpr double kBoundSlack = 1e-12;
constexpr double kIntegralityTol = 1e-9;
constexpr double kPositivityTol = 1e-9;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

template <class Point, class Value>
Value interpolate(const std::vector<Point>& points, double t, Value (*lerp)(const Value&, const Value&, double)) {
    if (t <= points.front().first) return points.front().second;
    if (t >= points.back().first) return points.back().second;
    const auto hi = std::upper_bound(points.begin(), points.end(), t,
                                     [](double x, const Point& p) { return x < p.first; });
    const auto lo = hi - 1;
    const double w = (t - lo->first) / (hi->first - lo->first);
    return lerp(lo->second, hi->second, w);
}

double lerp_scalar(const double& a, const double& b, double w) { return (1.0 - w) * a + w * b; }
Vector lerp_vector(const Vector& a, const Vector& b, double w) { return (1.0 - w) * a + w * b; }

void require_increasing(const auto& points, const char* what) {
    if (points.empty()) throw InputError(std::string(what) + ": table needs at least one point");
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (!(points[i].first > points[i - 1].first)) {
            throw InputError(std::string(what) + ": table times must be strictly increasing");
        }
    }
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

} // namespace

// ---------------------------------------------------------------- DelaySignal

DelaySignal::DelaySignal(Kind kind, double bound) : kind_(std::move(kind)), bound_(bound) {
    if (!(bound_ >= 0.0) || !std::isfinite(bound_)) {
        throw InputError("delay: declared bound must be finite and nonnegative");
    }
}

DelaySignal DelaySignal::constant(double value, double bound) {
    return DelaySignal(Constant{value}, bound);
}

DelaySignal DelaySignal::sinusoid(double offset, double amplitude, double omega, double phase, double bound) {
    return DelaySignal(Sinusoid{offset, amplitude, omega, phase}, bound);
}

DelaySignal DelaySignal::table(std::vector<std::pair<double, double>> points, double bound) {
    require_increasing(points, "delay");
    return DelaySignal(Table{std::move(points)}, bound);
}

DelaySignal DelaySignal::sequence(std::vector<long long> values, long long bound) {
    if (values.empty()) throw InputError("delay: sequence needs at least one value");
    return DelaySignal(Sequence{std::move(values)}, static_cast<double>(bound));
}

double DelaySignal::raw(double t) const {
    return std::visit(overloaded{
                          [](const Constant& c) { return c.value; },
                          [&](const Sinusoid& s) { return s.offset + s.amplitude * std::sin(s.omega * t + s.phase); },
                          [&](const Table& tab) { return interpolate(tab.points, t, &lerp_scalar); },
                          [&](const Sequence& seq) {
                              const auto n = static_cast<long long>(seq.values.size());
                              const auto k = static_cast<long long>(t);
                              return static_cast<double>(seq.values[static_cast<std::size_t>(((k % n) + n) % n)]);
                          },
                      },
                      kind_);
}

double DelaySignal::at(double t) const {
    if (is_sequence()) throw InputError("delay: integer sequences only drive discrete systems");
    double value = raw(t);
    const double slack = kBoundSlack * std::max(1.0, bound_);
    if (!(value >= -slack && value <= bound_ + slack)) {
        throw DelayBoundError("delay tau(" + fmt(t) + ") = " + fmt(value) + " outside [0, " + fmt(bound_) + "]");
    }
    return std::clamp(value, 0.0, bound_);
}

long long DelaySignal::at_step(long long k) const {
    const double value = raw(static_cast<double>(k));
    const double rounded = std::round(value);
    if (std::abs(value - rounded) > kIntegralityTol) {
        throw DelayBoundError("delay d(" + std::to_string(k) + ") = " + fmt(value) + " is not an integer");
    }
    if (rounded < 0.0 || rounded > bound_) {
        throw DelayBoundError("delay d(" + std::to_string(k) + ") = " + fmt(rounded) + " outside [0, " +
                              fmt(bound_) + "]");
    }
    return static_cast<long long>(rounded);
}

std::string DelaySignal::describe() const {
    std::ostringstream out;
    std::visit(overloaded{
                   [&](const Constant& c) { out << "constant " << c.value; },
                   [&](const Sinusoid& s) {
                       out << s.offset << " + " << s.amplitude << "*sin(" << s.omega << "*t + " << s.phase << ")";
                   },
                   [&](const Table& tab) { out << "table of " << tab.points.size() << " points"; },
                   [&](const Sequence& seq) { out << "cyclic sequence of " << seq.values.size() << " values"; },
               },
               kind_);
    out << ", bound " << bound_;
    return out.str();
}

// ------------------------------------------------------------- InitialHistory

InitialHistory InitialHistory::constant(Vector value) {
    if (value.size() < 1 || !value.allFinite()) throw InputError("history: constant must be a finite vector");
    const Index n = value.size();
    return InitialHistory(ConstantKind{std::move(value)}, n);
}

InitialHistory InitialHistory::expression(const std::vector<std::string>& components) {
    if (components.empty()) throw InputError("history: needs at least one component");
    const ParseOptions options{1, {"t"}};
    std::vector<ExprPtr> parsed;
    for (const auto& c : components) parsed.push_back(parse_expression(c, options));
    const auto n = static_cast<Index>(parsed.size());
    return InitialHistory(ExpressionKind{std::move(parsed)}, n);
}

InitialHistory InitialHistory::table(std::vector<std::pair<double, Vector>> points) {
    require_increasing(points, "history");
    const Index n = points.front().second.size();
    for (const auto& p : points) {
        if (p.second.size() != n || n < 1) throw InputError("history: table values must share one dimension");
        if (!p.second.allFinite()) throw InputError("history: table values must be finite");
    }
    return InitialHistory(TableKind{std::move(points)}, n);
}

bool InitialHistory::is_constant() const noexcept {
    return std::holds_alternative<ConstantKind>(kind_);
}

Vector InitialHistory::at(double s) const {
    return std::visit(overloaded{
                          [](const ConstantKind& c) { return c.value; },
                          [&](const ExpressionKind& e) {
                              Vector out(dimension_);
                              const double vars[1] = {s};
                              for (Index i = 0; i < dimension_; ++i)
                                  out[i] = evaluate(*e.components[static_cast<std::size_t>(i)], vars);
                              return out;
                          },
                          [&](const TableKind& tab) { return interpolate(tab.points, s, &lerp_vector); },
                      },
                      kind_);
}

double InitialHistory::weighted_norm(const PositiveVector& v, double lower, double step) const {
    if (is_constant()) return weighted_inf_norm(at(0.0), v);
    if (!(step > 0.0)) throw PreconditionError("history norm: step must be positive");
    double norm = weighted_inf_norm(at(0.0), v);
    const auto samples = static_cast<long long>(std::ceil(-lower / step - 1e-9));
    for (long long k = 1; k <= samples; ++k) {
        const double s = std::max(lower, -static_cast<double>(k) * step);
        norm = std::max(norm, weighted_inf_norm(at(s), v));
    }
    return norm;
}

// ----------------------------------------------------------------- simulation

std::uint64_t system_hash(const SystemSpec& sys) {
    std::ostringstream key;
    key.precision(17);
    key << to_string(sys.kind) << '|' << sys.f.describe() << '|' << sys.g.describe() << '|' << sys.delay_bound;
    std::uint64_t h = 1469598103934665603ULL; // FNV-1a
    for (unsigned char c : key.str()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

double default_step(double tau_max) {
    return tau_max > 0.0 ? std::min(1e-2, tau_max / 100.0) : 1e-2;
}

double default_envelope_tolerance(bool discrete) {
    return discrete ? 1e-9 : 1e-3;
}

namespace {

void check_system(const SystemSpec& sys, const DelaySignal& delay, const InitialHistory& history, bool continuous) {
    if (is_continuous(sys.kind) != continuous) {
        throw PreconditionError(continuous ? "simulate_continuous needs a continuous-time system"
                                           : "simulate_discrete needs a discrete-time system");
    }
    if (sys.f.dimension() != sys.g.dimension() || history.dimension() != sys.f.dimension()) {
        throw DimensionError("simulation: f, g and the initial history must share one dimension");
    }
    if (delay.declared_bound() > sys.delay_bound * (1.0 + kBoundSlack) + kBoundSlack) {
        throw DelayBoundError("delay bound " + fmt(delay.declared_bound()) + " exceeds the system bound " +
                              fmt(sys.delay_bound));
    }
}

Trajectory start(const SystemSpec& sys, const DelaySignal& delay, const std::optional<PositiveVector>& weight,
                 bool discrete) {
    Trajectory traj;
    traj.discrete = discrete;
    traj.weight = weight ? weight->values() : Vector::Ones(sys.dimension());
    traj.delay_description = delay.describe();
    traj.system_hash = system_hash(sys);
    return traj;
}

void record(Trajectory& traj, double t, Vector x) {
    traj.norm_track.push_back((x.cwiseAbs().array() / traj.weight.array()).maxCoeff());
    traj.times.push_back(t);
    traj.states.push_back(std::move(x));
}

} // namespace

Trajectory simulate_continuous(const SystemSpec& sys, const DelaySignal& delay, const InitialHistory& history,
                               double t_end, double step, const std::optional<PositiveVector>& weight) {
    check_system(sys, delay, history, true);
    if (!(step > 0.0)) throw PreconditionError("simulate_continuous: step must be positive");
    if (!(t_end > 0.0)) throw PreconditionError("simulate_continuous: t_end must be positive");
    if (delay.is_sequence()) throw PreconditionError("simulate_continuous: integer sequences are discrete-only");

    const auto steps = static_cast<long long>(std::ceil(t_end / step - 1e-9));
    const double h = t_end / static_cast<double>(steps);

    Trajectory traj = start(sys, delay, weight, false);
    traj.step = h;
    std::vector<Vector> slopes; // x'(t_k) for completed grid points
    traj.states.reserve(static_cast<std::size_t>(steps) + 1);
    record(traj, 0.0, history.at(0.0));

    // Tentative end of the current step, (x_{n+1}, x'(t_{n+1})), once one pass has been made.
    std::optional<std::pair<Vector, Vector>> ahead;
    bool implicit = false; // the current step read its own interior

    auto hermite = [h](const Vector& x0, const Vector& d0, const Vector& x1, const Vector& d1, double theta) {
        const double t2 = theta * theta, t3 = t2 * theta;
        return Vector((2 * t3 - 3 * t2 + 1) * x0 + (t3 - 2 * t2 + theta) * h * d0 + (-2 * t3 + 3 * t2) * x1 +
                      (t3 - t2) * h * d1);
    };

    // State at time s, seen from a stage at time t_stage with state x_stage.
    auto lookup = [&](double s, double t_stage, const Vector& x_stage) -> Vector {
        if (s >= t_stage) return x_stage;
        if (s <= 0.0) return history.at(s);
        const auto n = static_cast<long long>(traj.states.size()) - 1;
        const double t_n = static_cast<double>(n) * h;
        if (s > t_n) {
            implicit = true;
            const double theta = (s - t_n) / h;
            if (ahead) return hermite(traj.states.back(), slopes.back(), ahead->first, ahead->second, theta);
            const double w = (s - t_n) / (t_stage - t_n);
            return (1.0 - w) * traj.states.back() + w * x_stage;
        }
        const long long j = std::min(static_cast<long long>(s / h), n - 1);
        const double theta = (s - static_cast<double>(j) * h) / h;
        const Vector& x0 = traj.states[static_cast<std::size_t>(j)];
        const Vector& x1 = traj.states[static_cast<std::size_t>(j + 1)];
        const Vector& d0 = slopes[static_cast<std::size_t>(j)];
        if (static_cast<std::size_t>(j + 1) >= slopes.size()) {
            // Right slope not known yet (delay shorter than one step): quadratic fit.
            implicit = true;
            return Vector(x0 + h * theta * d0 + theta * theta * (x1 - x0 - h * d0));
        }
        return hermite(x0, d0, x1, slopes[static_cast<std::size_t>(j + 1)], theta);
    };

    auto rhs = [&](double t, const Vector& x) -> Vector {
        const double s = t - delay.at(t);
        return sys.f.evaluate(x) + sys.g.evaluate(lookup(s, t, x));
    };

    // Delays shorter than a step make the step implicit; it is then repeated
    // a few times, each pass reading the previous pass's Hermite extension.
    constexpr int kImplicitPasses = 4;
    for (long long k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * h;
        const double t_next = static_cast<double>(k + 1) * h;
        const Vector x = traj.states.back();
        ahead.reset();
        Vector next;
        for (int pass = 0; pass < kImplicitPasses; ++pass) {
            implicit = false;
            const Vector k1 = rhs(t, x);
            if (pass == 0) {
                slopes.push_back(k1);
            } else {
                slopes.back() = k1;
            }
            const Vector k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1);
            const Vector k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2);
            const Vector k4 = rhs(t + h, x + h * k3);
            next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (!implicit || !next.allFinite()) break;
            // The end-point slope reads the current interval through the previous pass.
            Vector slope_next = rhs(t_next, next);
            ahead = std::make_pair(next, std::move(slope_next));
        }
        if (!next.allFinite()) {
            traj.diagnostic = "non-finite state at t = " + fmt(t_next) + "; trajectory truncated";
            break;
        }
        record(traj, t_next, std::move(next));
    }
    return traj;
}

Trajectory simulate_discrete(const SystemSpec& sys, const DelaySignal& delay, const InitialHistory& history,
                             long long k_end, const std::optional<PositiveVector>& weight) {
    check_system(sys, delay, history, false);
    if (k_end < 0) throw PreconditionError("simulate_discrete: k_end must be nonnegative");

    Trajectory traj = start(sys, delay, weight, true);
    traj.step = 1.0;
    traj.states.reserve(static_cast<std::size_t>(k_end) + 1);
    record(traj, 0.0, history.at(0.0));

    for (long long k = 0; k < k_end; ++k) {
        const long long back = k - delay.at_step(k);
        const Vector delayed = back <= 0 ? history.at(static_cast<double>(back))
                                         : traj.states[static_cast<std::size_t>(back)];
        Vector next = sys.f.evaluate(traj.states[static_cast<std::size_t>(k)]) + sys.g.evaluate(delayed);
        if (!next.allFinite()) {
            traj.diagnostic = "non-finite state at k = " + std::to_string(k + 1) + "; trajectory truncated";
            break;
        }
        record(traj, static_cast<double>(k + 1), std::move(next));
    }
    return traj;
}

EnvelopeReport check_envelope(const Trajectory& traj, const PositiveVector& v, double rate, double phi_norm,
                              std::optional<double> tol_env) {
    const double tol = tol_env.value_or(default_envelope_tolerance(traj.discrete));
    EnvelopeReport report;
    report.effective_rate = traj.discrete ? rate : rate * (1.0 - kEnvelopeRateShrink);
    report.envelope.reserve(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double t = traj.times[k];
        const double decay = traj.discrete ? std::pow(report.effective_rate, t) : std::exp(-report.effective_rate * t);
        const double bound = phi_norm * decay;
        report.envelope.push_back(bound);
        const double norm = weighted_inf_norm(traj.states[k], v);
        double ratio = 0.0;
        if (norm > 0.0) ratio = bound > 0.0 ? norm / bound : std::numeric_limits<double>::infinity();
        report.max_ratio = std::max(report.max_ratio, ratio);
        if (ratio > 1.0 + tol && !report.first_violation) {
            report.first_violation = k;
            report.violation_time = t;
        }
    }
    report.pass = !report.first_violation.has_value();
    return report;
}

PositivityReport positivity_monitor(const Trajectory& traj) {
    PositivityReport report;
    if (traj.states.empty()) return report;
    report.min_entry = traj.states.front().minCoeff();
    for (const auto& x : traj.states) {
        report.min_entry = std::min(report.min_entry, x.minCoeff());
        report.max_norm = std::max(report.max_norm, x.cwiseAbs().maxCoeff());
    }
    const double floor = -kPositivityTol * report.max_norm;
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        if (traj.states[k].minCoeff() < floor) {
            report.first_violation = k;
            break;
        }
    }
    report.pass = !report.first_violation.has_value();
    return report;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const EnvelopeReport* envelope) {
    const Index n = traj.weight.size();
    out << "t";
    for (Index i = 0; i < n; ++i) out << ",x" << i + 1;
    out << ",norm_v";
    if (envelope) out << ",envelope";
    out << "\n";
    char buf[40];
    auto num = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return buf;
    };
    for (std::size_t k = 0; k < traj.size(); ++k) {
        if (traj.discrete) {
            out << static_cast<long long>(traj.times[k]);
        } else {
            out << num(traj.times[k]);
        }
        for (Index i = 0; i < n; ++i) out << ',' << num(traj.states[k][i]);
        out << ',' << num(traj.norm_track[k]);
        if (envelope) out << ',' << num(envelope->envelope[k]);
        out << "\n";
    }
}

} // namespace posdelay
