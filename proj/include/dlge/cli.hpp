#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dlge {

// Runs the command line given argv-style arguments (without the program
// name). Returns the process exit code:
//   0  success (analyze: warded and safe; check: satisfiable)
//   1  analysis rejected / route disagreement
//   2  parse or I/O error
//   3  chase failure (unsatisfiable input)
//   4  step limit exceeded
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace dlge
