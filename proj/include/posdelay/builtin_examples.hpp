#pragma once

#include "posdelay/document.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace posdelay {

/// Names of the compiled-in reference systems: example1, example2, example3.
std::vector<std::string> builtin_example_names();

/// JSON text of a compiled-in system; throws InputError for unknown names.
std::string_view builtin_example_json(std::string_view name);

SystemDocument builtin_example(std::string_view name);

} // namespace posdelay
