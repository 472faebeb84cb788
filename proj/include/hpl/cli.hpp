#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hpl::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kViolation = 1, kUsage = 2, kCapacity = 3 };

/// Runs the tool on `args` (without the program name). Artifacts go to `out`
/// unless --out names a file; diagnostics and the summary line go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hpl::cli
