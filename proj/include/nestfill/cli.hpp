#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nestfill {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSpecError = 2;
inline constexpr int kExitVerificationFailure = 3;

/// Entry point of the `nestfill` tool; args excludes the program name.
/// Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nestfill
