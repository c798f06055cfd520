#pragma once

#include <string>
#include <vector>

namespace oulab::cli {

/// Runs the command-line front end. args excludes the program name.
/// Exit codes: 0 pass, 1 usage/IO error, 2 failure, 3 inconclusive.
int run(const std::vector<std::string>& args);

}  // namespace oulab::cli
