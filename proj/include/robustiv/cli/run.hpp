#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace robustiv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitStatistical = 2;

/// Entry point shared by the executable and the tests. args excludes the
/// program name. Text goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace robustiv::cli
