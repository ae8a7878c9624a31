#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pgorder::cli {

/// Runs the command line `args` (without the program name). Normal output
/// goes to `out`, logs and errors to `err`. Returns the process exit status:
/// 0 on success, 1 on a runtime error, CLI11's code on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pgorder::cli
