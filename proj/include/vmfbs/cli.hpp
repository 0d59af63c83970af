#pragma once

#include <iosfwd>

namespace vmfbs {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSpec = 2;
inline constexpr int kExitSearch = 3;

/// Entry point of the vmfbs command line tool:
///   solve | compare | validate-metrics | rate
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vmfbs
