#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace simclust::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kValidation = 2,
    kIo = 3,
};

/// Runs one CLI invocation. `args` excludes the program name. Artifacts go
/// to files; `out` receives requested results (e.g. predicted classes) and
/// `err` receives logs and diagnostics.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace simclust::cli
