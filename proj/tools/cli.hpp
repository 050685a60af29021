#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nbmf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitUnsupported = 4;

/// Runs one `nbmf` invocation. `args` excludes the program name. Never
/// throws; failures are reported on `err` and through the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nbmf::cli
