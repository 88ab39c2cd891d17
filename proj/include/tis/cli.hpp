#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tis::cli {

// Entry point shared by the `tis` executable and the tests. `args` excludes
// the program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tis::cli
