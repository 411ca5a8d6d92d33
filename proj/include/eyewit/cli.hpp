#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace eyewit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitResource = 2;

/// Runs the command line `args` (without the program name). Reports go to
/// `out`, diagnostics to `err`; returns the process exit status.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace eyewit
