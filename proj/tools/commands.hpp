#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ammroute::cli {

// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,    // verify ran but the KKT check did not pass
  kValidation = 2,
  kNotConverged = 3,   // iteration cap, delta underflow or numerical failure
  kIoError = 4,
};

// Runs one subcommand (route, bench, verify, discrepancy). args excludes the
// program name. Results go to `out`, diagnostics to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ammroute::cli
