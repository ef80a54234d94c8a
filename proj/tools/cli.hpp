#pragma once

#include <iosfwd>

namespace wavekrylov::cli
{

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsageError = 1;
inline constexpr int kIncomplete = 2;

// Entry point shared by main() and the tests.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace wavekrylov::cli
