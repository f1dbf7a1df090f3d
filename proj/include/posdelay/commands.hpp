#pragma once

// Command-line front end. Every command writes one JSON object (reproduce:
// a text table) to `out` and returns the process exit code.

#include "posdelay/document.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace posdelay::cli {

enum ExitCode : int {
    kExitSuccess = 0,
    kExitNegative = 1, // analysis ran and the answer is "no" (not certifiable, infeasible, violation)
    kExitInput = 2,    // malformed input or invalid arguments
};

struct GlobalOptions {
    std::uint64_t seed = 1;
    double tol = 1e-9;
    int probe_trials = 200;
    bool assume_classes = false;
};

struct RateOverrides {
    std::optional<Vector> v;
    std::optional<double> tau_max;
    std::optional<long long> d_max;
};

struct SimulateOverrides {
    std::optional<double> t_end;
    std::optional<long long> k_end;
    std::optional<double> dt;
    std::optional<std::string> csv_path;
    /// (rate, v) for the envelope check.
    std::optional<std::pair<double, Vector>> envelope;
};

int cmd_check(const SystemDocument& doc, const GlobalOptions& opts, std::ostream& out);
int cmd_rate(const SystemDocument& doc, const GlobalOptions& opts, const RateOverrides& overrides,
             std::ostream& out);
int cmd_optimize(const SystemDocument& doc, const GlobalOptions& opts, std::ostream& out);
int cmd_simulate(const SystemDocument& doc, const GlobalOptions& opts, const SimulateOverrides& overrides,
                 std::ostream& out);
int cmd_reproduce(const std::string& example, const GlobalOptions& opts, std::ostream& out);

/// One line of the reproduction table.
struct ReproductionRow {
    std::string quantity;
    double reference;
    double computed;
    double tolerance;

    double delta() const;
    bool pass() const { return delta() <= tolerance; }
};

/// Reference values for the three compiled-in systems next to recomputed ones.
std::vector<ReproductionRow> reproduction_rows(const std::string& example, double tol);

/// Parses "a,b,c" into a vector; throws InputError.
Vector parse_number_list(const std::string& text);

/// Full command line: `posdelay check|rate|optimize|simulate|reproduce [args]`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace posdelay::cli
