#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace ripkit::cli {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitComputation = 2, kExitIo = 3 };

/// Help or an argument-parser error that ends the invocation before running.
struct EarlyExit {
  int code = kExitOk;
  std::string out;
  std::string err;
};

/// Parses command-line arguments (without the program name) into a resolved
/// configuration. Throws EarlyExit, UsageError, ParseError or IoError.
ExperimentConfig parse_config(const std::vector<std::string>& args);

/// Full invocation: parse, run, write. Returns the process exit code and
/// prints a one-line diagnostic to err on failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ripkit::cli
