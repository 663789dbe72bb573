#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace phonfeat::cli {

// Executes one invocation; args excludes the program name. Returns the
// process exit status: 0 success, 1 domain error (message verbatim on err),
// 2 usage error. Output is deterministic given argv and input files.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace phonfeat::cli
