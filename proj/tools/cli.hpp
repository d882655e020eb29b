#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lawrisk::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  exit_ok = 0,
  exit_check_failed = 1,
  exit_invalid_input = 2,
  exit_gate_refused = 3,
};

/// Runs the tool with `args` (excluding the program name), writing to `out` and `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// 17 significant digits (%.17g), enough to round-trip any double.
std::string format17(double x);

} // namespace lawrisk::cli
