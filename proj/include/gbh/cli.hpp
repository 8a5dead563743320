#pragma once

#include <ostream>

namespace gbh {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailed = 1,
  kExitInputError = 2,
  kExitIoError = 3,
};

/// Entry point of the `gbhtool` binary; subcommands bound, curve, simulate,
/// adjust and verify. Primary output goes to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gbh
