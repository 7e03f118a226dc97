#pragma once

// The `pcii` command line. run() is the whole program minus process setup,
// so tests can drive it with captured streams.
//
// Exit status: 0 success, 1 suite violation or invalid matrix, 2 usage error.

#include <ostream>
#include <string>
#include <vector>

namespace pcii {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pcii
