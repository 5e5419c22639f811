#pragma once

#include <iosfwd>

namespace pdbc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitSolver = 3;

/// Entry point of the `pdbc` tool. Subcommands solve-state, solve-control and
/// study read a TOML config and write CSV reports plus summary.json into
/// output.dir. Human-readable messages go to `err`; the JSON summary is also
/// echoed to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pdbc::cli
