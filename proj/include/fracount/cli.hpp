#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fracount::cli {

/// Exit codes of the command-line front end.
enum ExitCode : int {
    kOk = 0,
    /// verify found a failing property, or the output file could not be written.
    kFailure = 1,
    /// Unparseable arguments or a violated parameter constraint.
    kInvalid = 2,
    kNumeric = 3,
};

/// Runs one command. `args` excludes the program name. Tables go to `out`
/// (or to --output), diagnostics to `err`.
///
/// A relative --output path is resolved against $FRACOUNT_OUTPUT_DIR when set.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fracount::cli
