#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace entangle::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfigError = 2,
  kExitInsecure = 3,  // only with --strict
};

// Runs one command line (without the program name):
//   bell | qkd | schemes | spooky-speed | before-before   [options]
//   preset geneva [<command> [options] | --save <path>]
// Human-readable output goes to `out`, diagnostics to `err`.
int run_command(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace entangle::cli
