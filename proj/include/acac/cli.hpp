#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace acac {

/// Exit codes: 0 success/permit/safe, 1 deny/unsafe/failed expectation or
/// non-canonical input under `fmt --check`, 2 usage, I/O, parse or
/// validation error.
enum ExitCode : int { kExitOk = 0, kExitNegative = 1, kExitError = 2 };

/// Runs the `acac` command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace acac
