#pragma once

#include <iosfwd>

namespace emcal {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitData = 2,
    kExitValidation = 3,
};

/// Parses argv and runs one subcommand. Results and notes go to `out`, diagnostics and usage
/// text to `err`.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace emcal
