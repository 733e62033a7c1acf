#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace greenmig {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitInfeasible = 2,
};

/// Runs the command line `args` (args[0] is the program name). Output that is
/// not redirected with --out goes to `out`; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace greenmig
