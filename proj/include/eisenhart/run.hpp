#pragma once

#include <iosfwd>

#include "eisenhart/config.hpp"

namespace eisenhart {

enum ExitCode : int { kExitOk = 0, kExitSuiteFailure = 1, kExitInvalidConfig = 2, kExitNumericFailure = 3 };

/// Executes one configured command. The report goes to config.output_path
/// when set, otherwise to `out`; diagnostics go to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Exit code for an exception escaping a command.
int exit_code_for(const std::exception& e);

}  // namespace eisenhart
