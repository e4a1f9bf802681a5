#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace frolov::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable naming the directory for output files when
/// --output is not given.
inline constexpr const char* kOutputDirEnv = "FROLOV_OUTPUT_DIR";

/// Runs one command line (args[0] is the program name). Documents go to the
/// --output file (written atomically) or to `out`; the one-line summary and
/// error records go to `err`, or to `out` when a file was written.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace frolov::cli
