#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qnet::cli {

/// Runs one CLI invocation. Reports go to `out` (or the --out file),
/// diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

/// Parses "0..8" or "0,1,2,4" into a list of Grover powers.
std::vector<int> parse_schedule(const std::string &text);

}  // namespace qnet::cli
