#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qaia::cli {

// Runs one command line (without the program name). Returns the process exit
// status; diagnostics go to `err`, summaries and stdout artifacts to `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qaia::cli
