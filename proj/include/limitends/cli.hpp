#pragma once

// Batch front-end: construct, check, solve, sweep, conjugate, export.

#include <iosfwd>
#include <string>
#include <vector>

namespace limitends {

/// Exit codes shared by every command.
enum ExitCode : int { kExitOk = 0, kExitNegative = 1, kExitInput = 2, kExitNumeric = 3 };

/// args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace limitends
