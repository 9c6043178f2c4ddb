#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pcfit {

// Runs the command line `args` (program name excluded). Returns 0 on success,
// 1 when the input fails validation and 2 on a usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pcfit
