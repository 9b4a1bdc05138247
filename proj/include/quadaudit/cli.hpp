#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace quadaudit::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 2,  // bad flags, unreadable input, schema or validation failure
  kExitFlagged = 3,     // audit succeeded and the deployment checklist flagged the cohort
};

/// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace quadaudit::cli
