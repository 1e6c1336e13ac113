#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace adaptsolve {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kParseError = 2,
  kNotConverged = 3,
  kVerifyMismatch = 4,
};

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest round-trip scientific form with an unpadded exponent, e.g.
/// 3.8196601125010515e-1.
std::string format_double(double v);

}  // namespace adaptsolve
