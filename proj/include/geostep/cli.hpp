#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace geostep {

/// Exit codes shared by every subcommand.
enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_warnings = 2 };

/// Runs one CLI invocation; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace geostep
