#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace twinaudit::cli {

// Runs one CLI invocation; args exclude the program name. Returns the exit
// code: 0 success, 1 operation failed, 2 usage error.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace twinaudit::cli
