#pragma once

#include <string>

#include "dlge/program.hpp"
#include "dlge/syntax.hpp"

namespace fixtures {

// Shipped sample programs; these are the worked examples the test suite is
// built around.
std::string program_path(const std::string& name);
std::string read_file(const std::string& path);

// Parses or aborts; all fixtures are known-good.
dlge::Program load(const std::string& name);
dlge::Program parse(const std::string& text);

// Names of all shipped programs (without extension).
const std::vector<std::string>& all_programs();

inline dlge::Term c(const std::string& name) { return dlge::Term::constant(name); }
inline dlge::Term v(const std::string& name) { return dlge::Term::variable(name); }

} // namespace fixtures
