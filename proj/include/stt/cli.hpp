#pragma once

// The `stt` command line.

#include <ostream>
#include <string>
#include <vector>

namespace stt {

/// Runs the command line `args` (without the program name); returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stt
