#ifndef SOLVPINCH_CLI_HPP
#define SOLVPINCH_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace solvpinch {

/// Command-line front end. args excludes the program name.
/// Exit codes: 0 success, 1 usage, 2 invalid input, 3 flat input where F is
/// requested, 4 non-convergence or mismatch under --strict.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace solvpinch

#endif  // SOLVPINCH_CLI_HPP
