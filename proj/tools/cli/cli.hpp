#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace semantify::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kDataError = 3,
  kRemoteError = 4,
};

// Runs one `semantify` invocation. `args` excludes the program name.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace semantify::cli
