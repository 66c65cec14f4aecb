#pragma once

#include <string>
#include <vector>

namespace bflow {

/// Command-line entry point. Returns the process exit code:
///   0 — success (including the expected degenerate k = 1 spectrum),
///   2 — validation failure (bad flags, unreadable/malformed/singular input),
///   3 — numerical failure (under-resolved grid, unexpected degenerate
///       spectrum, non-convergent flow, failed line search, …).
/// Human-readable diagnostics go to the error stream; reports go to --output
/// or standard output.
int run_cli(int argc, const char* const* argv);

/// Test-friendly overload: args without the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace bflow
