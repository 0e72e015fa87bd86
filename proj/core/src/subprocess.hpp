#pragma once

#include <chrono>
#include <string>

namespace eqsat::detail {

struct CommandResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string output; // combined stdout + stderr
};

/// Run `command` through /bin/sh -c with a wall-clock timeout; the process
/// group is killed when the deadline passes.
CommandResult run_command(const std::string& command,
                          std::chrono::duration<double> timeout);

} // namespace eqsat::detail
