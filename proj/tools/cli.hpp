#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace knet::cli {

enum ExitCode : int {
  kOk = 0,
  kValidationFailure = 1,
  kUsageError = 2,
  kRuntimeError = 3,
};

/// Entry point of the `knet` command. `args` excludes the program name.
/// JSON goes to `out`; diagnostics go to `err`, prefixed with "error:".
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace knet::cli
