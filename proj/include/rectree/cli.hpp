#pragma once

#include <string>
#include <vector>

namespace rectree {

// Entry point behind the command-line binary. Exit codes: 0 success,
// 1 usage error, 2 data error, 3 internal invariant failure.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // args without the program name

}  // namespace rectree
