#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace psrkit {

enum ExitCode : int { kOk = 0, kInputError = 1, kInternalError = 2 };

/// Runs one psrkit invocation. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace psrkit
