#pragma once

#include <ostream>

namespace vrin {

// Exit codes: 0 success, 2 usage or config error, 3 data/model mismatch,
// 4 numeric failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitMismatch = 3;
inline constexpr int kExitNumeric = 4;

// Subcommands: generate, train, evaluate, impute.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vrin
