#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace zipper {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the `zipper` executable. `args` excludes the program name.
// Subcommands: test, simulate, power.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace zipper
