#pragma once

#include <iosfwd>

namespace omla {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,     // bad flags or unreadable/invalid input data
  kExitContract = 3,  // a pipeline stage's precondition or invariant broke
  kExitCheck = 4,     // verify found a failing bound
};

/// Entry point of the `omla` tool. Regular output goes to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace omla
