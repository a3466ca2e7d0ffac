#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pbrp::app {

enum ExitCode : int { kPass = 0, kVerdictFail = 1, kDiverged = 2, kIoFailure = 3, kConfigInvalid = 64 };

struct RunOptions {
  std::optional<std::string> config;  // path or bundled name
  std::string out = "out";
  int jobs = 1;
};

const std::vector<std::string>& command_names();

// Runs one subcommand over every experiment in the config, writes the
// reports under opt.out and returns the process exit code.
int run_command(const std::string& command, const RunOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace pbrp::app
