#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace reclab::cli {

/// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kVerdictFailed = 1,
    kConfigError = 2,
    kNumericGuard = 3,
    kHypothesis = 4,
};

/// Environment variable naming the default output directory.
inline constexpr const char* kOutEnv = "RECLAB_OUT";

/// Runs the command line `args` (without the program name) and returns the
/// exit code. Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace reclab::cli
