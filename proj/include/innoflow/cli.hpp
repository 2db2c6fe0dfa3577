#pragma once

// Command-line front end. `run` parses the arguments (without the program
// name), writes all artifacts plus manifest.txt into --out and returns the
// exit code: 0 success, 2 usage, 3 data, 4 numeric.

#include <iosfwd>
#include <string>
#include <vector>

namespace innoflow::cli {

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Single error line: `innoflow: error kind=<kind> code=<n>: <message>`.
std::string error_line(const std::string& kind, int code, const std::string& message);

}  // namespace innoflow::cli
