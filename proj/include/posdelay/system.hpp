#pragma once

#include "posdelay/vecfield.hpp"

#include <string>

namespace posdelay {

enum class SystemKind { ContinuousLinear, DiscreteLinear, ContinuousHomogeneous, DiscreteHomogeneous };

std::string to_string(SystemKind kind);
/// Throws InputError for unknown names.
SystemKind parse_system_kind(const std::string& name);

inline bool is_continuous(SystemKind k) {
    return k == SystemKind::ContinuousLinear || k == SystemKind::ContinuousHomogeneous;
}

inline bool is_linear(SystemKind k) {
    return k == SystemKind::ContinuousLinear || k == SystemKind::DiscreteLinear;
}

/// x'(t) = f(x(t)) + g(x(t - tau(t)))   or   x(k+1) = f(x(k)) + g(x(k - d(k))),
/// with delays bounded by delay_bound (tau_max, or the integer d_max).
struct SystemSpec {
    SystemKind kind;
    HomogeneousField f;
    HomogeneousField g;
    double delay_bound = 0.0;

    Index dimension() const noexcept { return f.dimension(); }
};

} // namespace posdelay
