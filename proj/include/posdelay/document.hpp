#pragma once

#include "posdelay/linalg.hpp"
#include "posdelay/simulate.hpp"
#include "posdelay/system.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace posdelay {

/// Optional simulation horizon and step stored with a system document.
struct SimulationBlock {
    std::optional<double> t_end;
    std::optional<double> dt;
    std::optional<long long> k_end;
};

/**
 * A system description as read from JSON. Linear kinds carry A and B,
 * homogeneous kinds carry the expression lists f and g; continuous kinds
 * carry tau_max, discrete kinds the integer d_max.
 */
struct SystemDocument {
    std::string name;
    SystemKind kind = SystemKind::ContinuousLinear;
    Index dimension = 0;
    std::optional<Matrix> a;
    std::optional<Matrix> b;
    std::optional<std::vector<std::string>> f;
    std::optional<std::vector<std::string>> g;
    std::optional<double> tau_max;
    std::optional<long long> d_max;
    std::optional<Vector> v;
    std::optional<DelaySignal> delay;
    std::optional<InitialHistory> initial_history;
    SimulationBlock simulation;

    double delay_bound() const;

    /// Builds the evaluable system. Linear kinds wrap A and B as linear fields.
    SystemSpec system() const;
};

/// Throws InputError (malformed JSON with its byte offset, missing or
/// misplaced fields, inconsistent dimensions) or ParseError (expressions).
SystemDocument parse_document(std::string_view json_text);

SystemDocument load_document(const std::string& path);

} // namespace posdelay
