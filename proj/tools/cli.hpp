#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace occam::cli {

/// Exit statuses shared by every subcommand.
enum ExitCode : int {
    kExitOk = 0,
    kExitEvaluationFailure = 1,
    kExitUsage = 2,
};

/// Runs the command line `args` (without the program name), writing reports
/// to `out` and diagnostics to `err`. Returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace occam::cli
