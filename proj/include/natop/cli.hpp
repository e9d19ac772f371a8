#pragma once

// Command-line entry point. Exit codes: 0 success, 1 a requested check
// failed, 2 malformed input or usage error.

#include <iosfwd>
#include <string>
#include <vector>

namespace natop {

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace natop
