#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace infometer::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitMissingField = 3;
inline constexpr int kExitUsage = 64;

/// Runs one command. `args` excludes the program name. Results go to `out`
/// (or the --output file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace infometer::cli
