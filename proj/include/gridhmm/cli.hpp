#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gridhmm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Entry point of the `gridhmm` tool. Data goes to `out` (or the file named
/// by --output), diagnostics to `err`. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gridhmm
