#include "posdelay/document.hpp"

#include "posdelay/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace posdelay {

using nlohmann::json;

std::string to_string(SystemKind kind) {
    switch (kind) {
    case SystemKind::ContinuousLinear: return "continuous-linear";
    case SystemKind::DiscreteLinear: return "discrete-linear";
    case SystemKind::ContinuousHomogeneous: return "continuous-homogeneous";
    case SystemKind::DiscreteHomogeneous: return "discrete-homogeneous";
    }
    return "unknown";
}

SystemKind parse_system_kind(const std::string& name) {
    for (auto k : {SystemKind::ContinuousLinear, SystemKind::DiscreteLinear, SystemKind::ContinuousHomogeneous,
                   SystemKind::DiscreteHomogeneous}) {
        if (to_string(k) == name) return k;
    }
    throw InputError("unknown system kind '" + name + "'");
}

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
    throw InputError(where + ": " + what);
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) bad(where, "expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) bad(where, "expected a finite number");
    return x;
}

long long integer(const json& j, const std::string& where) {
    if (j.is_number_integer()) return j.get<long long>();
    const double x = number(j, where);
    if (x != std::round(x)) bad(where, "expected an integer");
    return static_cast<long long>(x);
}

Vector vector_of(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) bad(where, "expected a non-empty array of numbers");
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Index>(i)] = number(j[i], where + "[" + std::to_string(i) + "]");
    return v;
}

Matrix matrix_of(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) bad(where, "expected an array of row arrays");
    const std::size_t rows = j.size();
    Matrix m(static_cast<Index>(rows), static_cast<Index>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::string row_where = where + "[" + std::to_string(r) + "]";
        if (!j[r].is_array() || j[r].size() != rows) bad(row_where, "matrix must be square");
        for (std::size_t c = 0; c < rows; ++c)
            m(static_cast<Index>(r), static_cast<Index>(c)) = number(j[r][c], row_where + "[" + std::to_string(c) + "]");
    }
    return m;
}

std::vector<std::string> strings_of(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) bad(where, "expected a non-empty array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_string()) bad(where + "[" + std::to_string(i) + "]", "expected a string");
        out.push_back(j[i].get<std::string>());
    }
    return out;
}

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) bad(where, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : j.items()) {
        if (!ok.count(item.key())) bad(where, "unexpected field '" + item.key() + "'");
    }
}

const json& required(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) bad(where, std::string("missing field '") + key + "'");
    return j.at(key);
}

DelaySignal delay_of(const json& j, bool continuous, double bound) {
    const std::string where = "delay";
    if (!j.is_object()) bad(where, "expected an object");
    const std::string kind = required(j, "kind", where).is_string() ? j.at("kind").get<std::string>() : "";
    if (kind == "constant") {
        only_keys(j, where, {"kind", "value"});
        return DelaySignal::constant(number(required(j, "value", where), "delay.value"), bound);
    }
    if (kind == "sinusoid") {
        only_keys(j, where, {"kind", "offset", "amplitude", "omega", "phase"});
        return DelaySignal::sinusoid(number(required(j, "offset", where), "delay.offset"),
                                     number(required(j, "amplitude", where), "delay.amplitude"),
                                     number(required(j, "omega", where), "delay.omega"),
                                     j.contains("phase") ? number(j.at("phase"), "delay.phase") : 0.0, bound);
    }
    if (kind == "table") {
        only_keys(j, where, {"kind", "points"});
        const json& pts = required(j, "points", where);
        if (!pts.is_array()) bad("delay.points", "expected an array of [t, tau] pairs");
        std::vector<std::pair<double, double>> points;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const std::string w = "delay.points[" + std::to_string(i) + "]";
            if (!pts[i].is_array() || pts[i].size() != 2) bad(w, "expected [t, tau]");
            points.emplace_back(number(pts[i][0], w), number(pts[i][1], w));
        }
        return DelaySignal::table(std::move(points), bound);
    }
    if (kind == "sequence") {
        if (continuous) bad(where, "integer sequences are only valid for discrete kinds");
        only_keys(j, where, {"kind", "values"});
        const json& vals = required(j, "values", where);
        if (!vals.is_array() || vals.empty()) bad("delay.values", "expected a non-empty array of integers");
        std::vector<long long> values;
        for (std::size_t i = 0; i < vals.size(); ++i)
            values.push_back(integer(vals[i], "delay.values[" + std::to_string(i) + "]"));
        return DelaySignal::sequence(std::move(values), static_cast<long long>(bound));
    }
    bad(where, "kind must be one of constant, sinusoid, table, sequence");
}

InitialHistory history_of(const json& j) {
    const std::string where = "initial_history";
    if (!j.is_object()) bad(where, "expected an object");
    const std::string kind = required(j, "kind", where).is_string() ? j.at("kind").get<std::string>() : "";
    if (kind == "constant") {
        only_keys(j, where, {"kind", "value"});
        return InitialHistory::constant(vector_of(required(j, "value", where), "initial_history.value"));
    }
    if (kind == "expression") {
        only_keys(j, where, {"kind", "components"});
        return InitialHistory::expression(strings_of(required(j, "components", where), "initial_history.components"));
    }
    if (kind == "table") {
        only_keys(j, where, {"kind", "points"});
        const json& pts = required(j, "points", where);
        if (!pts.is_array()) bad("initial_history.points", "expected an array of [t, [x...]] pairs");
        std::vector<std::pair<double, Vector>> points;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const std::string w = "initial_history.points[" + std::to_string(i) + "]";
            if (!pts[i].is_array() || pts[i].size() != 2) bad(w, "expected [t, [x...]]");
            points.emplace_back(number(pts[i][0], w), vector_of(pts[i][1], w));
        }
        return InitialHistory::table(std::move(points));
    }
    bad(where, "kind must be one of constant, expression, table");
}

} // namespace

double SystemDocument::delay_bound() const {
    if (tau_max) return *tau_max;
    if (d_max) return static_cast<double>(*d_max);
    return 0.0;
}

SystemSpec SystemDocument::system() const {
    if (is_linear(kind)) {
        return SystemSpec{kind, HomogeneousField::linear(*a), HomogeneousField::linear(*b), delay_bound()};
    }
    const auto n = static_cast<std::size_t>(dimension);
    const bool continuous = is_continuous(kind);
    return SystemSpec{kind,
                      HomogeneousField::from_expressions(parse_field(*f, n), 1.0,
                                                         continuous ? FieldClass::Cooperative
                                                                    : FieldClass::OrderPreserving),
                      HomogeneousField::from_expressions(parse_field(*g, n), 1.0, FieldClass::OrderPreserving),
                      delay_bound()};
}

SystemDocument parse_document(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InputError("malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    only_keys(root, "document",
              {"name", "kind", "A", "B", "f", "g", "tau_max", "d_max", "v", "delay", "initial_history", "simulation"});

    SystemDocument doc;
    const json& kind = required(root, "kind", "document");
    if (!kind.is_string()) bad("kind", "expected a string");
    doc.kind = parse_system_kind(kind.get<std::string>());
    if (root.contains("name")) {
        if (!root["name"].is_string()) bad("name", "expected a string");
        doc.name = root["name"].get<std::string>();
    }

    const bool linear = is_linear(doc.kind);
    const bool continuous = is_continuous(doc.kind);
    const std::string kind_name = to_string(doc.kind);
    auto forbid = [&](const char* key) {
        if (root.contains(key)) bad("document", std::string("field '") + key + "' is not valid for kind " + kind_name);
    };

    if (linear) {
        forbid("f");
        forbid("g");
        doc.a = matrix_of(required(root, "A", "document"), "A");
        doc.b = matrix_of(required(root, "B", "document"), "B");
        if (doc.a->rows() != doc.b->rows()) bad("B", "must have the same size as A");
        doc.dimension = doc.a->rows();
    } else {
        forbid("A");
        forbid("B");
        doc.f = strings_of(required(root, "f", "document"), "f");
        doc.g = strings_of(required(root, "g", "document"), "g");
        if (doc.f->size() != doc.g->size()) bad("g", "must have as many components as f");
        doc.dimension = static_cast<Index>(doc.f->size());
    }

    if (continuous) {
        forbid("d_max");
        doc.tau_max = number(required(root, "tau_max", "document"), "tau_max");
        if (*doc.tau_max < 0.0) bad("tau_max", "must be nonnegative");
    } else {
        forbid("tau_max");
        doc.d_max = integer(required(root, "d_max", "document"), "d_max");
        if (*doc.d_max < 0) bad("d_max", "must be nonnegative");
    }

    if (root.contains("v")) {
        doc.v = vector_of(root["v"], "v");
        if (doc.v->size() != doc.dimension) bad("v", "length must match the system dimension");
    }
    if (root.contains("delay")) doc.delay = delay_of(root["delay"], continuous, doc.delay_bound());
    if (root.contains("initial_history")) {
        doc.initial_history = history_of(root["initial_history"]);
        if (doc.initial_history->dimension() != doc.dimension) {
            bad("initial_history", "dimension must match the system dimension");
        }
    }
    if (root.contains("simulation")) {
        const json& sim = root["simulation"];
        if (continuous) {
            only_keys(sim, "simulation", {"t_end", "dt"});
            if (sim.contains("t_end")) doc.simulation.t_end = number(sim["t_end"], "simulation.t_end");
            if (sim.contains("dt")) doc.simulation.dt = number(sim["dt"], "simulation.dt");
        } else {
            only_keys(sim, "simulation", {"k_end"});
            if (sim.contains("k_end")) doc.simulation.k_end = integer(sim["k_end"], "simulation.k_end");
        }
    }

    // Surface expression and matrix problems now rather than at first use.
    try {
        (void)doc.system();
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw InputError(std::string("system: ") + e.what());
    }
    return doc;
}

SystemDocument load_document(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_document(text.str());
}

} // namespace posdelay
