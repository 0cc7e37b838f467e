#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace qest {

/// Runs the command line given its arguments (program name excluded).
/// Exit codes: 0 success, 1 solver/model error, 2 usage/config error.
/// Never throws on bad input.
int run_command(const std::vector<std::string>& args, std::ostream& out = std::cout,
                std::ostream& err = std::cerr);

} // namespace qest
