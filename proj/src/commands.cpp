#include "posdelay/commands.hpp"

#include "posdelay/builtin_examples.hpp"
#include "posdelay/certify.hpp"
#include "posdelay/decay.hpp"
#include "posdelay/error.hpp"
#include "posdelay/optimize.hpp"
#include "posdelay/simulate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace posdelay::cli {

using nlohmann::json;

namespace {

json to_json(const Vector& v) {
    json out = json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

std::string sig6(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

void emit(std::ostream& out, const json& j) {
    out << j.dump(2) << "\n";
}

bool positive_class(const SystemDocument& doc) {
    if (is_continuous(doc.kind)) return is_metzler(*doc.a) && is_nonnegative(*doc.b);
    return is_nonnegative(*doc.a) && is_nonnegative(*doc.b);
}

struct Certification {
    std::optional<StabilityCertificate> certificate;
    Vector slack;
    json probes = nullptr;
    std::vector<std::string> notes;
    bool positive = true; // linear kinds: A Metzler/nonnegative and B nonnegative
};

json probe_entry(const ProbeVerdict& verdict) {
    json j{{"pass", verdict.pass}};
    if (verdict.counterexample) {
        j["detail"] = verdict.counterexample->detail;
        j["x"] = to_json(verdict.counterexample->x);
    }
    return j;
}

// Runs the class probes of a homogeneous system; returns false if any fails.
bool run_probes(const SystemSpec& sys, const GlobalOptions& opts, Certification& cert) {
    const bool continuous = is_continuous(sys.kind);
    const int trials = opts.probe_trials;
    std::vector<std::pair<std::string, ProbeVerdict>> verdicts;
    verdicts.emplace_back("f_homogeneous_degree_one", probe_homogeneity(sys.f, 1.0, trials, opts.seed));
    verdicts.emplace_back("g_homogeneous_degree_one", probe_homogeneity(sys.g, 1.0, trials, opts.seed + 1));
    if (continuous) {
        verdicts.emplace_back("f_cooperative", probe_cooperative(sys.f, trials, opts.seed + 2));
    } else {
        verdicts.emplace_back("f_order_preserving", probe_order_preserving(sys.f, trials, opts.seed + 2));
    }
    verdicts.emplace_back("g_order_preserving", probe_order_preserving(sys.g, trials, opts.seed + 3));

    cert.probes = json::object();
    bool ok = true;
    for (const auto& [name, verdict] : verdicts) {
        cert.probes[name] = probe_entry(verdict);
        if (!verdict.pass) {
            ok = false;
            cert.notes.push_back("probe " + name + " failed: " + verdict.counterexample->detail);
        }
    }
    if (ok) cert.notes.push_back("field classes probed with " + std::to_string(trials) + " random samples");
    return ok;
}

Certification certify_document(const SystemDocument& doc, const GlobalOptions& opts,
                               const std::optional<Vector>& v_override) {
    Certification cert;
    const std::optional<Vector> candidate = v_override ? v_override : doc.v;
    const bool continuous = is_continuous(doc.kind);

    if (is_linear(doc.kind)) {
        cert.positive = positive_class(doc);
        const Matrix& a = *doc.a;
        const Matrix& b = *doc.b;
        if (!cert.positive) {
            cert.notes.push_back(continuous ? "A is not Metzler or B is not nonnegative; using the majorant (A^M, |B|)"
                                            : "A or B has negative entries; using (|A|, |B|)");
        }
        if (candidate) {
            const PositiveVector v(*candidate);
            VerifyResult r;
            if (cert.positive) {
                const SystemSpec sys = doc.system();
                r = continuous ? verify_continuous(sys.f, sys.g, v) : verify_discrete(sys.f, sys.g, v);
            } else {
                r = continuous ? verify_general_continuous(a, b, v) : verify_general_discrete(a, b, v);
            }
            cert.slack = r.slack;
            if (r) {
                cert.certificate = std::move(r.certificate);
                cert.notes.push_back("supplied v verified");
                return cert;
            }
            cert.notes.push_back("supplied v rejected; falling back to synthesis");
        }
        if (cert.positive) {
            cert.certificate = continuous ? synthesize_linear_continuous(MetzlerMatrix(a), NonnegativeMatrix(b))
                                          : synthesize_linear_discrete(NonnegativeMatrix(a), NonnegativeMatrix(b));
        } else {
            cert.certificate = continuous ? synthesize_general_continuous(a, b) : synthesize_general_discrete(a, b);
        }
        if (cert.certificate) {
            cert.slack = cert.certificate->slack;
            cert.notes.push_back("v synthesized from the all-ones linear solve");
        } else if (cert.positive) {
            cert.notes.push_back(continuous ? "A + B is not Hurwitz: not exponentially stable for all bounded delays"
                                            : "rho(A + B) >= 1: not exponentially stable for all bounded delays");
        } else {
            cert.notes.push_back("majorant condition fails; stability is not certified");
        }
        return cert;
    }

    const SystemSpec sys = doc.system();
    if (opts.assume_classes) {
        cert.notes.push_back("field classes assumed (--assume-classes), not probed");
    } else if (!run_probes(sys, opts, cert)) {
        return cert;
    }
    if (!candidate) {
        throw InputError("homogeneous kinds need a candidate v (document field 'v' or --v)");
    }
    const PositiveVector v(*candidate);
    VerifyResult r = continuous ? verify_continuous(sys.f, sys.g, v) : verify_discrete(sys.f, sys.g, v);
    cert.slack = r.slack;
    if (r) {
        cert.certificate = std::move(r.certificate);
        if (cert.certificate->smoothness_assumed) {
            cert.notes.push_back("f assumed continuously differentiable away from the origin");
        }
    } else {
        cert.notes.push_back(continuous ? "f(v) + g(v) < 0 fails at the supplied v"
                                        : "f(v) + g(v) < v fails at the supplied v");
    }
    return cert;
}

json notes_json(const std::vector<std::string>& notes) {
    json j = json::array();
    for (const auto& n : notes) j.push_back(n);
    return j;
}

} // namespace

Vector parse_number_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(item, &used);
        } catch (const std::exception&) {
            throw InputError("expected a comma-separated list of numbers, got '" + text + "'");
        }
        while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
        if (used != item.size() || !std::isfinite(x)) {
            throw InputError("expected a comma-separated list of numbers, got '" + text + "'");
        }
        values.push_back(x);
    }
    if (values.empty()) throw InputError("expected a non-empty list of numbers");
    return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

int cmd_check(const SystemDocument& doc, const GlobalOptions& opts, std::ostream& out) {
    const Certification cert = certify_document(doc, opts, std::nullopt);
    json j{{"command", "check"},
           {"kind", to_string(doc.kind)},
           {"stable", cert.certificate.has_value()},
           {"certificate_kind", cert.certificate ? json(to_string(cert.certificate->kind)) : json(nullptr)},
           {"v", cert.certificate ? to_json(cert.certificate->v.values()) : json(nullptr)},
           {"slack", cert.slack.size() ? to_json(cert.slack) : json(nullptr)},
           {"probes", cert.probes},
           {"notes", notes_json(cert.notes)}};
    emit(out, j);
    return cert.certificate ? kExitSuccess : kExitNegative;
}

int cmd_rate(const SystemDocument& doc, const GlobalOptions& opts, const RateOverrides& overrides,
             std::ostream& out) {
    const bool continuous = is_continuous(doc.kind);
    if (continuous && overrides.d_max) throw InputError("--d-max applies to discrete kinds only");
    if (!continuous && overrides.tau_max) throw InputError("--tau-max applies to continuous kinds only");
    if (overrides.v && overrides.v->size() != doc.dimension) {
        throw InputError("--v length must match the system dimension");
    }
    const double tau_max = overrides.tau_max.value_or(doc.tau_max.value_or(0.0));
    const long long d_max = overrides.d_max.value_or(doc.d_max.value_or(0));
    if (tau_max < 0.0 || d_max < 0) throw InputError("delay bounds must be nonnegative");

    const Certification cert = certify_document(doc, opts, overrides.v);
    json j{{"command", "rate"}, {"kind", to_string(doc.kind)}, {"continuous", continuous}};
    if (!cert.certificate) {
        j["certified"] = false;
        j["notes"] = notes_json(cert.notes);
        emit(out, j);
        return kExitNegative;
    }
    const PositiveVector& v = cert.certificate->v;

    RateResult rates;
    if (is_linear(doc.kind) && !cert.positive) {
        rates = continuous ? eta_components_general(*doc.a, *doc.b, v, tau_max, opts.tol)
                           : gamma_components_general(*doc.a, *doc.b, v, d_max, opts.tol);
    } else {
        const SystemSpec sys = doc.system();
        rates = continuous ? eta_components(sys.f, sys.g, v, tau_max, opts.tol)
                           : gamma_components(sys.f, sys.g, v, d_max, opts.tol);
    }

    j["certified"] = true;
    j["certificate_kind"] = to_string(cert.certificate->kind);
    j["v"] = to_json(v.values());
    j["delay_bound"] = continuous ? json(tau_max) : json(d_max);
    j["per_component"] = to_json(rates.per_component);
    j["residuals"] = to_json(rates.residuals);
    j["excluded"] = rates.excluded;
    j["aggregate"] = rates.aggregate;
    j["envelope"] = continuous ? "||x(t)||_inf^v <= ||phi|| * exp(-" + sig6(rates.aggregate) + " * t)"
                               : "||x(k)||_inf^v <= ||phi|| * " + sig6(rates.aggregate) + "^k";
    std::vector<std::string> notes = cert.notes;
    if (continuous) notes.push_back("every rate strictly below the aggregate is certified");
    j["warnings"] = notes_json(rates.warnings);
    j["notes"] = notes_json(notes);
    emit(out, j);
    return kExitSuccess;
}

int cmd_optimize(const SystemDocument& doc, const GlobalOptions& opts, std::ostream& out) {
    const bool continuous = is_continuous(doc.kind);
    json j{{"command", "optimize"}, {"kind", to_string(doc.kind)}, {"continuous", continuous}};
    if (!is_linear(doc.kind)) {
        j["feasible"] = false;
        j["message"] = "optimization requires linear kind";
        emit(out, j);
        return kExitNegative;
    }
    const bool positive = positive_class(doc);
    std::optional<OptimalRate> best;
    if (continuous) {
        best = positive ? optimize_eta(MetzlerMatrix(*doc.a), NonnegativeMatrix(*doc.b), *doc.tau_max, opts.tol)
                        : optimize_general_continuous(*doc.a, *doc.b, *doc.tau_max, opts.tol);
    } else {
        best = positive ? optimize_gamma(NonnegativeMatrix(*doc.a), NonnegativeMatrix(*doc.b), *doc.d_max, opts.tol)
                        : optimize_general_discrete(*doc.a, *doc.b, *doc.d_max, opts.tol);
    }
    std::vector<std::string> notes;
    if (!positive) notes.push_back("optimized over the majorant system");
    j["delay_bound"] = continuous ? json(*doc.tau_max) : json(*doc.d_max);
    if (!best) {
        j["feasible"] = false;
        j["message"] = continuous ? "A + B is not Hurwitz; no decay rate can be certified"
                                  : "rho(A + B) >= 1; no decay rate can be certified";
        j["notes"] = notes_json(notes);
        emit(out, j);
        return kExitNegative;
    }
    j["feasible"] = true;
    j["rate_name"] = continuous ? "eta*" : "gamma*";
    j["rate"] = best->rate;
    j["v_star"] = to_json(best->v_star.values());
    j["iterations"] = best->iterations;
    j["residual"] = best->residual;
    j["degenerate"] = best->degenerate;
    j["warnings"] = notes_json(best->warnings);
    j["notes"] = notes_json(notes);
    emit(out, j);
    return kExitSuccess;
}

int cmd_simulate(const SystemDocument& doc, const GlobalOptions&, const SimulateOverrides& overrides,
                 std::ostream& out) {
    const bool continuous = is_continuous(doc.kind);
    const SystemSpec sys = doc.system();
    const double bound = doc.delay_bound();
    const DelaySignal delay = doc.delay ? *doc.delay
                                        : (continuous ? DelaySignal::constant(bound, bound)
                                                      : DelaySignal::sequence({*doc.d_max}, *doc.d_max));
    const InitialHistory history = doc.initial_history
                                       ? *doc.initial_history
                                       : InitialHistory::constant(doc.v ? *doc.v : Vector::Ones(doc.dimension));

    std::optional<PositiveVector> weight;
    if (overrides.envelope) {
        weight = PositiveVector(overrides.envelope->second);
    } else if (doc.v) {
        weight = PositiveVector(*doc.v);
    }
    if (weight && weight->size() != doc.dimension) throw InputError("envelope v length must match the dimension");

    Trajectory traj;
    double step = 1.0;
    if (continuous) {
        if (overrides.k_end) throw InputError("--k-end applies to discrete kinds only");
        const double t_end = overrides.t_end.value_or(doc.simulation.t_end.value_or(10.0));
        step = overrides.dt.value_or(doc.simulation.dt.value_or(default_step(bound)));
        if (!(t_end > 0.0) || !(step > 0.0)) throw InputError("--t-end and --dt must be positive");
        traj = simulate_continuous(sys, delay, history, t_end, step, weight);
        step = traj.step;
    } else {
        if (overrides.t_end || overrides.dt) throw InputError("--t-end/--dt apply to continuous kinds only");
        const long long k_end = overrides.k_end.value_or(doc.simulation.k_end.value_or(100));
        if (k_end < 0) throw InputError("--k-end must be nonnegative");
        traj = simulate_discrete(sys, delay, history, k_end, weight);
    }

    std::optional<EnvelopeReport> envelope;
    json envelope_json = nullptr;
    if (overrides.envelope) {
        const PositiveVector& v = *weight;
        const double phi_norm = history.weighted_norm(v, -bound, step);
        envelope = check_envelope(traj, v, overrides.envelope->first, phi_norm);
        envelope_json = json{{"rate", overrides.envelope->first},
                             {"effective_rate", envelope->effective_rate},
                             {"v", to_json(v.values())},
                             {"phi_norm", phi_norm},
                             {"max_ratio", envelope->max_ratio},
                             {"tolerance", default_envelope_tolerance(traj.discrete)},
                             {"pass", envelope->pass},
                             {"first_violation", envelope->first_violation
                                                     ? json{{"index", *envelope->first_violation},
                                                            {"t", *envelope->violation_time}}
                                                     : json(nullptr)}};
    }

    if (overrides.csv_path) {
        std::ofstream csv(*overrides.csv_path);
        if (!csv) throw InputError("cannot write '" + *overrides.csv_path + "'");
        write_trajectory_csv(csv, traj, envelope ? &*envelope : nullptr);
    }

    const PositivityReport positivity = positivity_monitor(traj);
    std::ostringstream hash;
    hash << std::hex << std::setw(16) << std::setfill('0') << traj.system_hash;
    json j{{"command", "simulate"},
           {"kind", to_string(doc.kind)},
           {"samples", traj.size()},
           {"t_final", traj.times.empty() ? 0.0 : traj.times.back()},
           {"step", traj.step},
           {"delay", traj.delay_description},
           {"system_hash", hash.str()},
           {"csv", overrides.csv_path ? json(*overrides.csv_path) : json(nullptr)},
           {"diagnostic", traj.diagnostic ? json(*traj.diagnostic) : json(nullptr)},
           {"positivity",
            {{"pass", positivity.pass}, {"min_entry", positivity.min_entry}, {"max_norm", positivity.max_norm}}},
           {"envelope", envelope_json}};
    emit(out, j);
    if (traj.diagnostic || (envelope && !envelope->pass)) return kExitNegative;
    return kExitSuccess;
}

double ReproductionRow::delta() const {
    return std::abs(computed - reference);
}

std::vector<ReproductionRow> reproduction_rows(const std::string& example, const double tol) {
    const SystemDocument doc = builtin_example(example);
    const SystemSpec sys = doc.system();
    std::vector<ReproductionRow> rows;
    if (example == "example1") {
        const RateResult r = eta_components(sys.f, sys.g, PositiveVector(*doc.v), *doc.tau_max, tol);
        rows.push_back({"eta_1 (v = (1,1), tau_max = 6)", 0.0825, r.per_component[0], 1e-3});
        rows.push_back({"eta_2 (v = (1,1), tau_max = 6)", 0.1705, r.per_component[1], 1e-3});
    } else if (example == "example2") {
        const MetzlerMatrix a(*doc.a);
        const NonnegativeMatrix b(*doc.b);
        const MetzlerMatrix sum(*doc.a + *doc.b);
        const PositiveVector w = perron_vector(sum, tol);
        const RateResult r = eta_components(sys.f, sys.g, PositiveVector(*doc.v), *doc.tau_max, tol);
        const auto best = optimize_eta(a, b, *doc.tau_max, tol);
        rows.push_back({"pi(A + B)", -1.3139, spectral_abscissa(sum, tol), 1e-3});
        rows.push_back({"Perron vector v1_1", 0.7645, w[0], 1e-3});
        rows.push_back({"Perron vector v1_2", 0.6446, w[1], 1e-3});
        rows.push_back({"eta_1 (v = v1, tau_max = 6)", 0.0583, r.per_component[0], 1e-3});
        rows.push_back({"eta_2 (v = v1, tau_max = 6)", 0.1957, r.per_component[1], 1e-3});
        rows.push_back({"eta*", 0.0838, best ? best->rate : NAN, 1e-3});
        rows.push_back({"v*_1", 0.9020, best ? best->v_star[0] : NAN, 1e-2});
        rows.push_back({"v*_2", 0.4317, best ? best->v_star[1] : NAN, 1e-2});
    } else if (example == "example3") {
        const auto best = optimize_gamma(NonnegativeMatrix(*doc.a), NonnegativeMatrix(*doc.b), *doc.d_max, tol);
        rows.push_back({"gamma*", 0.9320, best ? best->rate : NAN, 1e-3});
        rows.push_back({"v*_1", 0.6884, best ? best->v_star[0] : NAN, 1e-2});
        rows.push_back({"v*_2", 0.7254, best ? best->v_star[1] : NAN, 1e-2});
    } else {
        throw InputError("unknown example '" + example + "' (expected example1, example2 or example3)");
    }
    return rows;
}

int cmd_reproduce(const std::string& example, const GlobalOptions& opts, std::ostream& out) {
    const auto rows = reproduction_rows(example, opts.tol);
    bool all = true;
    out << example << "\n";
    out << std::left << std::setw(32) << "quantity" << std::setw(12) << "reference" << std::setw(12) << "computed"
        << std::setw(12) << "|delta|" << std::setw(10) << "tol"
        << "pass\n";
    for (const auto& row : rows) {
        const bool ok = row.pass();
        all = all && ok;
        out << std::left << std::setw(32) << row.quantity << std::setw(12) << sig6(row.reference) << std::setw(12)
            << sig6(row.computed) << std::setw(12) << sig6(row.delta()) << std::setw(10) << sig6(row.tolerance)
            << (ok ? "yes" : "NO") << "\n";
    }
    out << (all ? "all quantities reproduced" : "reproduction FAILED") << "\n";
    return all ? kExitSuccess : kExitNegative;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Delay-independent stability certificates and decay rates for positive time-delay systems",
                 "posdelay"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions opts;
    app.add_option("--seed", opts.seed, "Seed for the randomized class probes");
    app.add_option("--tol", opts.tol, "Solver tolerance")->check(CLI::PositiveNumber);

    std::string path;
    std::string v_text;
    bool assume = false;
    RateOverrides rate_over;
    SimulateOverrides sim_over;
    std::string envelope_text;
    std::string csv_path;
    std::string example;

    auto* check = app.add_subcommand("check", "Certify delay-independent exponential stability");
    check->add_option("document", path, "System document (JSON)")->required();
    check->add_flag("--assume-classes", assume, "Skip the class probes for homogeneous kinds");

    auto* rate = app.add_subcommand("rate", "Per-component and aggregate decay rates for a certificate");
    rate->add_option("document", path, "System document (JSON)")->required();
    rate->add_option("--v", v_text, "Certificate v as a comma-separated list");
    rate->add_option("--tau-max", rate_over.tau_max, "Override tau_max");
    rate->add_option("--d-max", rate_over.d_max, "Override d_max");
    rate->add_flag("--assume-classes", assume, "Skip the class probes for homogeneous kinds");

    auto* optimize = app.add_subcommand("optimize", "Optimal decay-rate bound for a linear system");
    optimize->add_option("document", path, "System document (JSON)")->required();

    auto* simulate = app.add_subcommand("simulate", "Simulate and optionally check an exponential envelope");
    simulate->add_option("document", path, "System document (JSON)")->required();
    simulate->add_option("--t-end", sim_over.t_end, "Final time (continuous)");
    simulate->add_option("--k-end", sim_over.k_end, "Final step (discrete)");
    simulate->add_option("--dt", sim_over.dt, "Integration step (continuous)");
    simulate->add_option("--out", csv_path, "Write the trajectory CSV here");
    simulate->add_option("--envelope", envelope_text, "rate,v1,...,vn");

    auto* reproduce = app.add_subcommand("reproduce", "Recompute the reference examples");
    reproduce->add_option("example", example, "example1 | example2 | example3")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }
    opts.assume_classes = assume;

    try {
        if (*reproduce) return cmd_reproduce(example, opts, out);
        const SystemDocument doc = load_document(path);
        if (*check) return cmd_check(doc, opts, out);
        if (*rate) {
            if (!v_text.empty()) rate_over.v = parse_number_list(v_text);
            return cmd_rate(doc, opts, rate_over, out);
        }
        if (*optimize) return cmd_optimize(doc, opts, out);
        if (*simulate) {
            if (!csv_path.empty()) sim_over.csv_path = csv_path;
            if (!envelope_text.empty()) {
                const Vector parts = parse_number_list(envelope_text);
                if (parts.size() != doc.dimension + 1) {
                    throw InputError("--envelope expects rate followed by " + std::to_string(doc.dimension) +
                                     " weights");
                }
                sim_over.envelope = std::make_pair(parts[0], Vector(parts.tail(doc.dimension)));
            }
            return cmd_simulate(doc, opts, sim_over, out);
        }
    } catch (const InputError& e) {
        err << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ParseError& e) {
        err << "expression error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ValidationError& e) {
        err << "invalid value: " << e.what() << "\n";
        return kExitInput;
    } catch (const DimensionError& e) {
        err << "dimension error: " << e.what() << "\n";
        return kExitInput;
    } catch (const DelayBoundError& e) {
        err << "delay error: " << e.what() << "\n";
        return kExitInput;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitNegative;
    }
    return kExitInput;
}

} // namespace posdelay::cli
