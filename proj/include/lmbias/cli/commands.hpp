#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lmbias::cli {

enum ExitCode : int { kSuccess = 0, kAnalysisFailure = 1, kUsageError = 2 };

// Parses `args` (without the program name) and runs one subcommand. Normal
// output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lmbias::cli
