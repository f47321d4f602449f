#pragma once

#include <ostream>

namespace qionize {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2 };

/// Entry point of the `qionize` tool with injectable streams.
/// Subcommands: ratio, flux, amplitude-grid, sweep, oracle-check, presets.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qionize
