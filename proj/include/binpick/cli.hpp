#pragma once

namespace binpick::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNoResult = 2;

/// Entry point for the `binpick` tool. Never throws; errors become a single
/// diagnostic line on stderr and exit code 1.
int run(int argc, char** argv);

}  // namespace binpick::cli
