#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace leafvgg::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,    ///< bad flags or configuration
  kExitData = 3,     ///< dataset, image or manifest problems
  kExitFormat = 4,   ///< weight file or shape incompatibilities
  kExitNumeric = 5,  ///< non-finite values, degenerate statistics
};

/// Parses `args` (without the program name) and runs one subcommand.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace leafvgg::cli
