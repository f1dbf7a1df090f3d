#include "posdelay/builtin_examples.hpp"

#include "posdelay/error.hpp"

namespace posdelay {

namespace {

// Homogeneous cooperative system with a time-varying delay 5 + sin(t).
constexpr std::string_view kExample1 = R"json({
  "name": "example1",
  "kind": "continuous-homogeneous",
  "f": ["-3*x1 + 6*x2 - 3*sqrt(x1^2 + x2^2)", "2*x1 - 2*x2 - sqrt(x1^2 + x2^2)"],
  "g": ["x1*x2/sqrt(x1^2 + x2^2)", "x1*x2/sqrt(2*x1^2 + 3*x2^2)"],
  "tau_max": 6,
  "v": [1, 1],
  "delay": {"kind": "sinusoid", "offset": 5, "amplitude": 1, "omega": 1, "phase": 0},
  "initial_history": {"kind": "constant", "value": [1, 1]},
  "simulation": {"t_end": 60, "dt": 0.01}
})json";

// Positive linear system; v is the Perron eigenvector of A + B.
constexpr std::string_view kExample2 = R"json({
  "name": "example2",
  "kind": "continuous-linear",
  "A": [[-6, 2], [1, -3]],
  "B": [[3, 0], [0, 0.5]],
  "tau_max": 6,
  "v": [0.7645, 0.6446],
  "delay": {"kind": "sinusoid", "offset": 5, "amplitude": 1, "omega": 1, "phase": 0},
  "initial_history": {"kind": "constant", "value": [0.7645, 0.6446]},
  "simulation": {"t_end": 60, "dt": 0.01}
})json";

// Discrete positive linear system with delay 4 + sin(k pi / 2) in {3, 4, 5}.
constexpr std::string_view kExample3 = R"json({
  "name": "example3",
  "kind": "discrete-linear",
  "A": [[0.4, 0.1], [0.2, 0.6]],
  "B": [[0.3, 0], [0, 0.1]],
  "d_max": 5,
  "v": [0.6884, 0.7254],
  "delay": {"kind": "sinusoid", "offset": 4, "amplitude": 1, "omega": 1.5707963267948966, "phase": 0},
  "initial_history": {"kind": "constant", "value": [0.6884, 0.7254]},
  "simulation": {"k_end": 100}
})json";

} // namespace

std::vector<std::string> builtin_example_names() {
    return {"example1", "example2", "example3"};
}

std::string_view builtin_example_json(std::string_view name) {
    if (name == "example1") return kExample1;
    if (name == "example2") return kExample2;
    if (name == "example3") return kExample3;
    throw InputError("unknown example '" + std::string(name) + "' (expected example1, example2 or example3)");
}

SystemDocument builtin_example(std::string_view name) {
    return parse_document(builtin_example_json(name));
}

} // namespace posdelay
