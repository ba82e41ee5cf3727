#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ouint::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitDimension = 3;
inline constexpr int kExitIntervention = 4;
inline constexpr int kExitNoStationary = 5;

/// Runs one command line (without the program name). Output is written to
/// `out` only when the command succeeds; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ouint::cli
