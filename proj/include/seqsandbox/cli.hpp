#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace seqsandbox {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitBudget = 3,
  kExitIo = 4,
};

// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "SEQSANDBOX_OUT";

// Entry point of the command-line tool; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace seqsandbox
