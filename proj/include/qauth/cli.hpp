#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qauth::cli {

/// Exit codes shared by every command.
enum ExitCode : int {
  kOk = 0,
  /// Analyzed and found insecure, or an output invariant was violated.
  kInsecure = 1,
  kUsage = 2,
};

/// Runs one command line (without the program name). Reports go to out,
/// diagnostics to err. Honors QAUTH_SEED and QAUTH_MAX_DIM.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace qauth::cli
