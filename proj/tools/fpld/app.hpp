#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fpld::cli {

enum ExitStatus : int {
  kSuccess = 0,
  kConfigError = 1,
  kPropertyFailure = 2,
  kNumericalFailure = 3,
};

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fpld::cli
