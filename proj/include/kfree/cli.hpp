#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kfree::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,   // a verification or acceptance check failed
  kUsage = 2,
  kCapacity = 3,  // capacity or resource (I/O) error
};

// Runs the command line (args excludes the program name). Reports go to
// `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kfree::cli
