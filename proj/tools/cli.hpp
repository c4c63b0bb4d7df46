#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spinxfer::cli {

enum ExitCode : int {
  kOk = 0,
  kVerifyFailed = 1,
  kInputError = 2,
  kIoError = 3,
  kRuntimeError = 4,
};

/// Entry point of the spinxfer tool; args[0] is the program name.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "a,b,c" or "start:stop:step" (inclusive stop, within half a step).
std::vector<double> parse_real_list(const std::string& text);

}  // namespace spinxfer::cli
