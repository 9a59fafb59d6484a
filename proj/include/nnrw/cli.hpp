#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nnrw {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,     ///< bad flags, configuration or dimension mismatch
  kExitData = 2,      ///< unreadable dataset or model file
  kExitNumeric = 3,   ///< singular system, non-finite values, overflow
};

/// Runs `nnrw <args...>`; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nnrw
