#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace strbill {

enum ExitCode : int { exit_ok = 0, exit_violation = 1, exit_input = 2 };

// Command-line entry point. args excludes the program name. The document of a
// subcommand goes to --out when given (a one-line summary then goes to out),
// otherwise to out. Diagnostics and usage go to err.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace strbill
