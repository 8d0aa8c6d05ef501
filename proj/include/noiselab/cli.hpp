#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace noiselab::cli {

/// Parses and executes one CLI invocation (argv without the program name).
/// Returns the process exit code: 0 success, 1 usage/validation error,
/// 2 numerical failure. All regular output goes to `out` (or the --out
/// file); diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace noiselab::cli
