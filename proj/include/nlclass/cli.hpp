#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nlclass {

// Process exit codes of the nlclass tool.
enum ExitCode : int {
  exit_ok = 0,
  exit_verify_failed = 1,
  exit_input = 2,
  exit_no_certificate = 3,
  exit_numerical = 4,
};

// Runs one command line (args excludes the program name) and returns its exit
// code. Normal output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Maps the in-flight exception onto an exit code and prints it to `err`.
int report_exception(std::ostream& err);

}  // namespace nlclass
