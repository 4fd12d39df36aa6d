#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hdual {

// Command-line driver behind the hdual binary, separated out so tests can run
// commands in-process. `args` excludes the program name. Reports go to `out`
// (or the --out file), diagnostics to `err`. Returns the process exit code:
// 0 success, 1 usage error, 2 input parse error, 3 numerical failure,
// 4 certificate not found or invalid.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hdual
