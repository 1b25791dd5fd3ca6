#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace waylab {

struct CommandResult {
  int exit_code = 0;  // 0 success, 1 domain/validation failure, 2 usage error
  std::vector<std::string> artifacts;
  std::string summary;
};

/// Runs one subcommand (build, validate, optimize, sweep, sample, nogo).
/// `args` excludes the program name. Normal output goes to `out`,
/// diagnostics and usage text to `err`.
CommandResult run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace waylab
