#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stein_gauge::cli {

enum ExitCode : int {
  kSuccess = 0,
  kValidationError = 2,
  kNumericFailure = 3,
  kVerificationFailure = 4,
};

/// Runs one `stein-gauge` invocation. `args` excludes the program name.
/// The JSON report goes to `out` (or to --output), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stein_gauge::cli
