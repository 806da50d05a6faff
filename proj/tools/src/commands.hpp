#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cbi::cli {

enum ExitCode : int {
  kOk = 0,
  kFailed = 1,  // verify found a gap, or an unexpected internal error
  kParseError = 2,
  kValidationError = 3,
  kUnsupportedRegime = 4,
  kNoBound = 5,
};

// Entry point shared by the binary and the tests. Reports go to `out` unless
// --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cbi::cli
