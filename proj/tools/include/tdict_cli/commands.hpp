#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tdict::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kData = 3,
  kNumeric = 4,
};

/// Parses argv and runs one subcommand. Messages go to out and err; the
/// return value is the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace tdict::cli
