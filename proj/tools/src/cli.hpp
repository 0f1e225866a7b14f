#pragma once

namespace dsm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Parses argv, runs one subcommand, returns the process exit code.
int run(int argc, char** argv);

}  // namespace dsm::cli
