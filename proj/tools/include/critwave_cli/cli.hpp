#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace critwave::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kRuntimeFailure = 3,
  kChannelFailure = 4,
};

/// Runs the command line; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace critwave::cli
