#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cuspidal::cli {

enum ExitCode { kSuccess = 0, kAnalysisFailure = 1, kUsageError = 2 };

/// Runs one subcommand. args excludes the program name. Reports go to out,
/// usage text to err; files are written under --out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cuspidal::cli
