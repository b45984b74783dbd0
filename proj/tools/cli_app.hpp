#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace coboson::cli {

// Runs the command line tool. args excludes the program name. Returns the
// process exit code: 0 success, 2 usage or input error, 3 domain or numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace coboson::cli
