#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace emg {

/// Runs the `emgassist` command line (args exclude the program name).
/// Returns the process exit code; errors are written to `err` as `error: <message>`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace emg
