#pragma once

#include <iosfwd>

namespace mask {

/// Exit codes of the `mask` tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitData = 3,
  kExitRemote = 4,
};

/// Entry point of the `mask` command-line tool.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mask
