#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hrafl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Entry point shared by the executable and the tests. `args` excludes argv[0].
// Summary lines go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hrafl::cli
